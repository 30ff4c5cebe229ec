#include "poolcomp/fixtures.hpp"

#include <cstdio>
#include <string>

#include "poolcomp/rng.hpp"

namespace poolcomp {

StudyDataset eight_schools() {
    std::vector<GroupSummary> g = {
        {"A", 28.0, 15.0, {}}, {"B", 8.0, 10.0, {}}, {"C", -3.0, 16.0, {}}, {"D", 7.0, 11.0, {}},
        {"E", -1.0, 9.0, {}},  {"F", 1.0, 11.0, {}}, {"G", 18.0, 10.0, {}}, {"H", 12.0, 18.0, {}},
    };
    auto ds = make_dataset(std::move(g));
    ds.metadata["source"] = "eight_schools";
    return ds;
}

StudyDataset synthetic_states(std::uint64_t seed) {
    Rng rng = Rng::substream(seed, stream::kFixture, 0);
    std::vector<GroupSummary> g;
    for (std::size_t i = 0; i < kStatesCount; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "S%02zu", i + 1);
        const double truth = rng.normal(240.0, 8.0);
        const double se = 0.8 + 0.8 * rng.uniform();
        g.push_back({id, truth + rng.normal(0.0, se), se, {}});
    }
    auto ds = make_dataset(std::move(g));
    ds.metadata["source"] = "synthetic_states";
    ds.metadata["seed"] = std::to_string(seed);
    return ds;
}

}  // namespace poolcomp
