#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "poolprev/errors.hpp"
#include "poolprev/sim/harness.hpp"
#include "poolprev/util/format.hpp"

namespace poolprev {

inline constexpr const char* kTrialsCsvHeader =
    "condition_id,trial,p_true,m,n,q,se,sp,alpha,beta,y,z,covered,ci_low,ci_high,ci_width,"
    "posterior_mean";

inline constexpr const char* kAggregatesCsvHeader =
    "condition_id,coverage,width_mean,width_std,e_mean,e_std,pct_error,failures";

/// Writes through a temporary file in the same directory and renames into
/// place, so readers never observe a partial file.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::function<void(std::ostream&)>& writer) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        writer(out);
        out.flush();
        if (!out) throw io_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                           ec.message());
}

inline void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << kTrialsCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.condition_id << ',' << r.trial << ',' << format_shortest(r.p_true) << ',' << r.m
            << ',' << r.n << ',' << r.q << ',' << format_shortest(r.se) << ','
            << format_shortest(r.sp) << ',' << format_shortest(r.alpha) << ','
            << format_shortest(r.beta) << ',' << r.y << ',' << r.z << ',' << (r.covered ? 1 : 0)
            << ',' << format_shortest(r.ci_low) << ',' << format_shortest(r.ci_high) << ','
            << format_shortest(r.ci_width) << ',' << format_shortest(r.posterior_mean) << '\n';
    }
}

inline void write_trials_csv(const std::filesystem::path& path,
                             const std::vector<TrialRecord>& records) {
    atomic_write_file(path, [&](std::ostream& out) { write_trials_csv(out, records); });
}

inline void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                                 const std::map<std::string, long>& failures) {
    out << kAggregatesCsvHeader << '\n';
    for (const auto& r : rows) {
        auto it = failures.find(r.condition_id);
        long failed = it == failures.end() ? 0 : it->second;
        out << r.condition_id << ',' << format_shortest(r.coverage) << ','
            << format_shortest(r.width_mean) << ',' << format_shortest(r.width_std) << ','
            << format_shortest(r.e_mean) << ',' << format_shortest(r.e_std) << ','
            << format_shortest(r.pct_error) << ',' << failed << '\n';
    }
}

inline void write_aggregates_csv(const std::filesystem::path& path,
                                 const std::vector<AggregateRow>& rows,
                                 const std::map<std::string, long>& failures = {}) {
    atomic_write_file(path, [&](std::ostream& out) { write_aggregates_csv(out, rows, failures); });
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_double_field(const std::string& s, const char* what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw validation_error(std::string("bad numeric field for ") + what + ": '" + s + "'");
    }
    return v;
}

inline long parse_long_field(const std::string& s, const char* what) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw validation_error(std::string("bad integer field for ") + what + ": '" + s + "'");
    }
    return v;
}

} // namespace detail

/// Reads a trials.csv produced by write_trials_csv (header checked).
inline std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw validation_error("empty trials file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrialsCsvHeader) {
        throw validation_error("unexpected trials.csv header in " + path.string());
    }

    std::vector<TrialRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 17) {
            throw validation_error("line " + std::to_string(line_no) + " of " + path.string() +
                                   " has " + std::to_string(f.size()) + " fields, expected 17");
        }
        TrialRecord r;
        r.condition_id = f[0];
        r.trial = detail::parse_long_field(f[1], "trial");
        r.p_true = detail::parse_double_field(f[2], "p_true");
        r.m = detail::parse_long_field(f[3], "m");
        r.n = detail::parse_long_field(f[4], "n");
        r.q = detail::parse_long_field(f[5], "q");
        r.se = detail::parse_double_field(f[6], "se");
        r.sp = detail::parse_double_field(f[7], "sp");
        r.alpha = detail::parse_double_field(f[8], "alpha");
        r.beta = detail::parse_double_field(f[9], "beta");
        r.y = detail::parse_long_field(f[10], "y");
        r.z = detail::parse_long_field(f[11], "z");
        r.covered = detail::parse_long_field(f[12], "covered") != 0;
        r.ci_low = detail::parse_double_field(f[13], "ci_low");
        r.ci_high = detail::parse_double_field(f[14], "ci_high");
        r.ci_width = detail::parse_double_field(f[15], "ci_width");
        r.posterior_mean = detail::parse_double_field(f[16], "posterior_mean");
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace poolprev
