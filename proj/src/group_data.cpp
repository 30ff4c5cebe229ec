#include "poolcomp/group_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "poolcomp/error.hpp"

namespace poolcomp {

const char* to_string(Provenance p) {
    return p == Provenance::SummaryLevel ? "summary-level" : "reduced-from-units";
}

std::vector<std::string> StudyDataset::group_ids() const {
    std::vector<std::string> out;
    out.reserve(summaries.size());
    for (const auto& s : summaries) out.push_back(s.group_id);
    return out;
}

std::vector<double> StudyDataset::estimates() const {
    std::vector<double> out;
    out.reserve(summaries.size());
    for (const auto& s : summaries) out.push_back(s.estimate);
    return out;
}

std::vector<double> StudyDataset::std_errors() const {
    std::vector<double> out;
    out.reserve(summaries.size());
    for (const auto& s : summaries) out.push_back(s.std_error);
    return out;
}

StudyDataset make_dataset(std::vector<GroupSummary> summaries, Provenance provenance) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        const std::string where = "group " + std::to_string(i + 1) + " ('" + s.group_id + "')";
        if (s.group_id.empty()) throw InputError(where + ": empty group id");
        if (!seen.insert(s.group_id).second) throw InputError(where + ": duplicate group id");
        if (!std::isfinite(s.estimate)) throw InputError(where + ": estimate is not finite");
        if (!std::isfinite(s.std_error) || s.std_error <= 0.0) {
            throw InputError(where + ": std_error must be > 0");
        }
        if (s.n && *s.n <= 0) throw InputError(where + ": n must be a positive integer");
    }
    if (summaries.size() < 2) {
        throw InputError("dataset has " + std::to_string(summaries.size()) +
                         " group(s); at least 2 are required");
    }
    StudyDataset ds;
    ds.summaries = std::move(summaries);
    ds.provenance = provenance;
    return ds;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

CsvTable read_table(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_row(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            t.rows.emplace_back(line_no, std::move(fields));
        }
    }
    if (t.header.empty()) throw InputError(source + ": empty file, expected a header row");
    return t;
}

void check_header(const CsvTable& t, const std::vector<std::string>& required,
                  const std::string& optional, const std::string& source) {
    const auto& h = t.header;
    bool ok = h.size() >= required.size() && h.size() <= required.size() + 1 &&
              std::equal(required.begin(), required.end(), h.begin());
    if (ok && h.size() == required.size() + 1) ok = h.back() == optional;
    if (!ok) {
        std::string expected;
        for (const auto& r : required) expected += r + ",";
        throw InputError(source + ": header must be '" + expected + "[" + optional + "]'");
    }
}

std::string row_context(const std::string& source, std::size_t line_no) {
    return source + ": row " + std::to_string(line_no);
}

double parse_real(const std::string& field, const std::string& name, const std::string& ctx) {
    double v = 0.0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw InputError(ctx + ": field '" + name + "' is not a number: '" + field + "'");
    }
    return v;
}

long parse_integer(const std::string& field, const std::string& name, const std::string& ctx) {
    long v = 0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw InputError(ctx + ": field '" + name + "' is not an integer: '" + field + "'");
    }
    return v;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    return in;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    std::size_t n = 0;
};

// Values are sorted first so the result does not depend on record order.
Moments moments(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    Moments m;
    m.n = v.size();
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(m.n);
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.var = m.n > 1 ? ss / static_cast<double>(m.n - 1) : 0.0;
    return m;
}

}  // namespace

StudyDataset read_summaries(std::istream& in, const std::string& source) {
    const CsvTable t = read_table(in, source);
    check_header(t, {"group", "estimate", "std_error"}, "n", source);
    std::vector<GroupSummary> out;
    std::set<std::string> seen;
    for (const auto& [line_no, f] : t.rows) {
        const std::string ctx = row_context(source, line_no);
        if (f.size() != t.header.size()) {
            throw InputError(ctx + ": expected " + std::to_string(t.header.size()) +
                             " fields, found " + std::to_string(f.size()));
        }
        GroupSummary s;
        s.group_id = f[0];
        if (s.group_id.empty()) throw InputError(ctx + ": missing group id");
        if (!seen.insert(s.group_id).second) {
            throw InputError(ctx + ": duplicate group id '" + s.group_id + "'");
        }
        s.estimate = parse_real(f[1], "estimate", ctx);
        s.std_error = parse_real(f[2], "std_error", ctx);
        if (s.std_error <= 0.0) throw InputError(ctx + ": std_error must be > 0, got " + f[2]);
        if (f.size() == 4 && !f[3].empty()) {
            s.n = parse_integer(f[3], "n", ctx);
            if (*s.n <= 0) throw InputError(ctx + ": n must be a positive integer");
        }
        out.push_back(std::move(s));
    }
    if (out.size() < 2) {
        throw InputError(source + ": " + std::to_string(out.size()) +
                         " group(s) found; at least 2 are required");
    }
    return make_dataset(std::move(out), Provenance::SummaryLevel);
}

StudyDataset load_summaries(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    auto ds = read_summaries(in, path.string());
    ds.metadata["source"] = path.filename().string();
    return ds;
}

std::vector<UnitRecord> read_units(std::istream& in, const std::string& source) {
    const CsvTable t = read_table(in, source);
    check_header(t, {"group", "outcome"}, "treatment", source);
    std::vector<UnitRecord> out;
    for (const auto& [line_no, f] : t.rows) {
        const std::string ctx = row_context(source, line_no);
        if (f.size() != t.header.size()) {
            throw InputError(ctx + ": expected " + std::to_string(t.header.size()) +
                             " fields, found " + std::to_string(f.size()));
        }
        UnitRecord r;
        r.group_id = f[0];
        if (r.group_id.empty()) throw InputError(ctx + ": missing group id");
        r.outcome = parse_real(f[1], "outcome", ctx);
        if (f.size() == 3) {
            const long flag = parse_integer(f[2], "treatment", ctx);
            if (flag != 0 && flag != 1) throw InputError(ctx + ": treatment must be 0 or 1");
            r.treatment = static_cast<int>(flag);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<UnitRecord> load_units(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_units(in, path.string());
}

std::vector<GroupSummary> reduce_units(const std::vector<UnitRecord>& records) {
    if (records.empty()) throw InputError("reduce_units: no records");
    const bool with_treatment = records.front().treatment.has_value();
    for (const auto& r : records) {
        if (r.treatment.has_value() != with_treatment) {
            throw InputError("reduce_units: treatment flag must be present on all records or none");
        }
        if (r.treatment && *r.treatment != 0 && *r.treatment != 1) {
            throw InputError("reduce_units: group '" + r.group_id + "': treatment must be 0 or 1");
        }
    }

    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> control, treated;
    for (const auto& r : records) {
        if (!control.contains(r.group_id) && !treated.contains(r.group_id)) {
            order.push_back(r.group_id);
            control[r.group_id];
            treated[r.group_id];
        }
        (r.treatment.value_or(0) == 1 ? treated : control)[r.group_id].push_back(r.outcome);
    }

    std::vector<GroupSummary> out;
    std::vector<std::string> problems;
    for (const auto& id : order) {
        GroupSummary s;
        s.group_id = id;
        if (!with_treatment) {
            const auto& v = control[id];
            if (v.size() < 2) {
                problems.push_back("group '" + id + "': fewer than 2 units");
                continue;
            }
            const Moments m = moments(v);
            s.estimate = m.mean;
            s.std_error = std::sqrt(m.var / static_cast<double>(m.n));
            s.n = static_cast<long>(m.n);
        } else {
            const auto& c = control[id];
            const auto& t = treated[id];
            if (c.empty() || t.empty()) {
                problems.push_back("group '" + id + "': treatment arm " +
                                   (t.empty() ? std::string("1") : std::string("0")) + " is empty");
                continue;
            }
            if (c.size() < 2 || t.size() < 2) {
                problems.push_back("group '" + id + "': each arm needs at least 2 units");
                continue;
            }
            const Moments mc = moments(c);
            const Moments mt = moments(t);
            s.estimate = mt.mean - mc.mean;
            s.std_error = std::sqrt(mt.var / static_cast<double>(mt.n) +
                                    mc.var / static_cast<double>(mc.n));
            s.n = static_cast<long>(mc.n + mt.n);
        }
        if (!(s.std_error > 0.0)) {
            problems.push_back("group '" + id + "': zero within-group variance");
            continue;
        }
        out.push_back(std::move(s));
    }
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "reduce_units:";
        for (const auto& p : problems) msg << "\n  " << p;
        throw InputError(msg.str());
    }
    return out;
}

}  // namespace poolcomp
