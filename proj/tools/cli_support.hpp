#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <occ/exact_pmf.hpp>
#include <occ/model.hpp>

namespace occ::cli {

struct CountsParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses `occupancy,count` lines (blank lines and #-comments skipped).
/// Throws CountsParseError with the offending line number.
std::map<long long, long long> parse_counts_file(std::istream& in,
                                                 const std::string& name);
std::map<long long, long long> parse_counts_file(const std::string& path);

/// Implied ball count sum of occupancy * count.
long long implied_n(const std::map<long long, long long>& counts);

struct ScanOptions {
    int d = 2;
    long long m_min = 20;
    long long m_max = 100;
    long long m_step = 10;
    double ratio_min = 0.5;
    double ratio_max = 2.0;
    int ratio_steps = 4;
    std::uint64_t seed = 0;
    int threads = 1;
    long long mc_samples = 100000;  // fallback budget above the exact budget
    PmfBudget budget;               // exact-mode auto-select limits
    std::string format = "csv";     // csv | json
};

struct ScanRow {
    long long n = 0, m = 0;
    int d = 0;
    std::string mode;  // "exact", "float" or "mc"
    double mu = 0.0, sigma2 = 0.0, r = 0.0;
    double d_k = 0.0, d_k_se = 0.0;  // se only for mc rows
    double d_k_times_r = 0.0;
    double lower_bound = 0.0;
    std::string domain;
    std::string error;  // nonempty when the point failed
};

std::vector<std::pair<long long, long long>> scan_grid(const ScanOptions& opt);

/// Evaluates one grid point. Never throws: failures land in row.error.
ScanRow scan_point(long long n, long long m, const ScanOptions& opt,
                   std::uint64_t row_index);

/// Runs the whole grid on a worker pool and writes rows in grid order.
/// Output is byte-identical for a given (options, seed) at any thread count.
void run_scan(const ScanOptions& opt, std::ostream& out);

std::string format_double(double v);

}  // namespace occ::cli
