#pragma once

#include <cstdint>
#include <random>

namespace poolcomp {

/// Seedable generator used everywhere a random number is needed.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard, so draws are reproducible across compilers and platforms.
/// Substreams: a child stream for (seed, tag, index) is seeded with
/// splitmix64(splitmix64(seed ^ tag) + index), which keeps replications and
/// use sites decorrelated without sharing state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();

    /// Standard normal via the inverse-CDF transform of uniform().
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag,
                                        std::uint64_t index);

    static Rng substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
        return Rng(substream_seed(seed, tag, index));
    }

private:
    std::mt19937_64 engine_;
};

/// Use-site tags for substreams.
namespace stream {
inline constexpr std::uint64_t kGridFit = 0x6669742d67726964ULL;     // "fit-grid"
inline constexpr std::uint64_t kReplication = 0x73696d2d72657073ULL;  // "sim-reps"
inline constexpr std::uint64_t kFixture = 0x6669787475726573ULL;      // "fixtures"
}  // namespace stream

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace poolcomp
