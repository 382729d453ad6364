#include "cli_support.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include <occ/coupling.hpp>
#include <occ/normal.hpp>
#include <occ/rng.hpp>

namespace occ::cli {

std::map<long long, long long> parse_counts_file(std::istream& in,
                                                 const std::string& name) {
    std::map<long long, long long> counts;
    std::string line;
    long long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        long long occ_value = 0, count = 0;
        char extra = 0;
        const int got = std::sscanf(line.c_str(), " %lld , %lld %c", &occ_value,
                                    &count, &extra);
        if (got != 2) {
            throw CountsParseError(name + ":" + std::to_string(lineno) +
                                   ": expected `occupancy,count`, got \"" + line + "\"");
        }
        if (occ_value < 0 || count < 0) {
            throw CountsParseError(name + ":" + std::to_string(lineno) +
                                   ": negative values rejected");
        }
        counts[occ_value] += count;
    }
    return counts;
}

std::map<long long, long long> parse_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CountsParseError(path + ": cannot open");
    return parse_counts_file(in, path);
}

long long implied_n(const std::map<long long, long long>& counts) {
    long long n = 0;
    for (const auto& [occ_value, count] : counts) n += occ_value * count;
    return n;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::pair<long long, long long>> scan_grid(const ScanOptions& opt) {
    std::vector<std::pair<long long, long long>> grid;
    std::set<std::pair<long long, long long>> seen;
    for (long long m = opt.m_min; m <= opt.m_max; m += opt.m_step) {
        for (int i = 0; i <= opt.ratio_steps; ++i) {
            const double rho =
                opt.ratio_min + (opt.ratio_max - opt.ratio_min) *
                                    (opt.ratio_steps > 0
                                         ? static_cast<double>(i) / opt.ratio_steps
                                         : 0.0);
            const long long n = std::llround(rho * static_cast<double>(m));
            if (n < std::max(opt.d, 1)) continue;
            if (seen.insert({m, n}).second) grid.emplace_back(n, m);
        }
    }
    return grid;
}

namespace {

// Kolmogorov distance of an empirical pmf against the normal with the
// closed-form moments; the tie convention matches kolmogorov_distance().
double empirical_d_k(const std::vector<double>& probs, double mu, double sigma) {
    double cdf = 0.0, best = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double phi = normal_cdf((static_cast<double>(k) - mu) / sigma);
        best = std::max(best, std::fabs(cdf - phi));
        cdf += probs[k];
        best = std::max(best, std::fabs(cdf - phi));
    }
    return best;
}

}  // namespace

ScanRow scan_point(long long n, long long m, const ScanOptions& opt,
                   std::uint64_t row_index) {
    ScanRow row;
    row.n = n;
    row.m = m;
    row.d = opt.d;
    try {
        OccupancyParams params{n, m, opt.d};
        params.validate();
        const MomentSummary ms = moments(params);
        row.mu = ms.mu;
        row.sigma2 = ms.sigma2;
        row.r = ms.r;
        row.domain = to_string(classify_domain(params).label);
        if (ms.sigma2 <= 0.0) {
            row.error = "zero variance";
            return row;
        }
        if (n <= opt.budget.max_n && m <= opt.budget.max_m) {
            const ExactPmf pmf = exact_pmf(params, opt.budget);
            const KolmogorovReport rep = kolmogorov_distance(pmf);
            row.mode = "exact";
            row.d_k = rep.d_k;
            row.lower_bound = rep.lower_bound;
        } else {
            const long long samples = std::max<long long>(opt.mc_samples, 1000);
            const long long kcap = opt.d >= 1 ? n / opt.d : m;
            std::vector<double> probs(kcap + 1, 0.0);
            const std::uint64_t row_seed = opt.seed ^ splitmix64(row_index + 1);
            for (long long i = 0; i < samples; ++i) {
                auto gen = substream(row_seed, static_cast<std::uint64_t>(i));
                const Configuration cfg = sample_multinomial(n, m, gen);
                probs[cfg.count_at(opt.d)] += 1.0;
            }
            for (auto& p : probs) p /= static_cast<double>(samples);
            const double sigma = std::sqrt(ms.sigma2);
            row.mode = "mc";
            row.d_k = empirical_d_k(probs, ms.mu, sigma);
            row.d_k_se = 0.5 / std::sqrt(static_cast<double>(samples));
            row.lower_bound = 0.087 / std::max(3.0, sigma);
        }
        row.d_k_times_r = row.d_k * row.r;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

void run_scan(const ScanOptions& opt, std::ostream& out) {
    const auto grid = scan_grid(opt);
    std::vector<ScanRow> rows(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            rows[i] = scan_point(grid[i].first, grid[i].second, opt,
                                 static_cast<std::uint64_t>(i));
        }
    };
    const int nthreads = std::max(1, opt.threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (opt.format == "json") {
        nlohmann::json j;
        j["schema"] = "occ-scan-v1";
        j["d"] = opt.d;
        j["seed"] = opt.seed;
        auto arr = nlohmann::json::array();
        for (const auto& row : rows) {
            arr.push_back({{"n", row.n},
                           {"m", row.m},
                           {"d", row.d},
                           {"mode", row.mode},
                           {"mu", row.mu},
                           {"sigma2", row.sigma2},
                           {"r", row.r},
                           {"d_k", row.d_k},
                           {"d_k_se", row.d_k_se},
                           {"d_k_times_r", row.d_k_times_r},
                           {"lower_bound", row.lower_bound},
                           {"domain", row.domain},
                           {"error", row.error}});
        }
        j["rows"] = std::move(arr);
        out << j.dump(2) << '\n';
        return;
    }

    out << "# occ-scan schema v1\n";
    out << "n,m,d,mode,mu,sigma2,r,d_k,d_k_se,d_k_times_r,lower_bound,domain,error\n";
    for (const auto& row : rows) {
        out << row.n << ',' << row.m << ',' << row.d << ',' << row.mode << ','
            << format_double(row.mu) << ',' << format_double(row.sigma2) << ','
            << format_double(row.r) << ',' << format_double(row.d_k) << ','
            << format_double(row.d_k_se) << ',' << format_double(row.d_k_times_r)
            << ',' << format_double(row.lower_bound) << ',' << row.domain << ','
            << row.error << '\n';
    }
}

}  // namespace occ::cli
