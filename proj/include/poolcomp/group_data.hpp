#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace poolcomp {

/// One group's point estimate and standard error, in outcome units.
struct GroupSummary {
    std::string group_id;
    double estimate = 0.0;
    double std_error = 1.0;
    std::optional<long> n;
};

/// A single unit-level observation; `treatment` is 0/1 when present.
struct UnitRecord {
    std::string group_id;
    double outcome = 0.0;
    std::optional<int> treatment;
};

enum class Provenance { SummaryLevel, ReducedFromUnits };

const char* to_string(Provenance p);

/// Canonical input for every analysis: ordered group summaries.
struct StudyDataset {
    std::vector<GroupSummary> summaries;
    Provenance provenance = Provenance::SummaryLevel;
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return summaries.size(); }
    std::vector<std::string> group_ids() const;
    std::vector<double> estimates() const;
    std::vector<double> std_errors() const;
};

/// Validates ids (non-empty, unique), finiteness, std_error > 0 and the
/// two-group minimum. Throws InputError.
StudyDataset make_dataset(std::vector<GroupSummary> summaries,
                          Provenance provenance = Provenance::SummaryLevel);

/// Summary CSV: header `group,estimate,std_error[,n]`.
StudyDataset read_summaries(std::istream& in, const std::string& source = "<stream>");
StudyDataset load_summaries(const std::filesystem::path& path);

/// Unit CSV: header `group,outcome[,treatment]`.
std::vector<UnitRecord> read_units(std::istream& in, const std::string& source = "<stream>");
std::vector<UnitRecord> load_units(const std::filesystem::path& path);

/// Two-stage reduction to per-group summaries in first-appearance order.
/// Without treatment flags: mean and sd/sqrt(n). With flags: difference in
/// arm means and sqrt(s_t^2/n_t + s_c^2/n_c). Sample sd uses n - 1.
/// All offending groups are reported together in one InputError.
std::vector<GroupSummary> reduce_units(const std::vector<UnitRecord>& records);

}  // namespace poolcomp
