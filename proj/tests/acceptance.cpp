// Acceptance gate: every release-blocking property in one binary, one
// pass/fail line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include <occ/coupling.hpp>
#include <occ/exact_pmf.hpp>
#include <occ/model.hpp>
#include <occ/rng.hpp>
#include <occ/verify.hpp>

#include "cli_support.hpp"
#include "enumeration_oracle.hpp"

namespace {

int failures = 0;

void report(int id, const char* what, bool pass, const std::string& detail = "") {
    std::printf("[%s] %2d. %s%s%s\n", pass ? "PASS" : "FAIL", id, what,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
    std::fflush(stdout);
}

// 1. exact pmf and moments equal full enumeration for n<=8, m<=4, d<=4
void criterion1() {
    bool ok = true;
    std::string detail;
    for (long long n = 0; n <= 8 && ok; ++n) {
        for (long long m = 2; m <= 4 && ok; ++m) {
            for (int d = 0; d <= 4 && ok; ++d) {
                const auto expected = oracle::enumerate_pmf(n, m, d);
                const auto pmf = occ::exact_pmf({n, m, d});
                for (std::size_t k = 0; k < expected.size(); ++k) {
                    if (pmf.probs_q[k] != expected[k]) {
                        ok = false;
                        detail = "pmf mismatch at n=" + std::to_string(n) +
                                 " m=" + std::to_string(m) + " d=" + std::to_string(d);
                        break;
                    }
                }
                if (!ok) break;
                const auto [mu, var] = occ::exact_moments(pmf);
                const auto [emu, evar] = oracle::enumerate_moments(n, m, d);
                if (mu != emu || var != evar ||
                    (n >= d && mu != occ::mean_exact({n, m, d})) ||
                    (n >= d && var != occ::variance_exact({n, m, d}))) {
                    ok = false;
                    detail = "moment mismatch at n=" + std::to_string(n) +
                             " m=" + std::to_string(m) + " d=" + std::to_string(d);
                }
            }
        }
    }
    report(1, "exact law equals brute-force enumeration (n<=8, m<=4, d<=4)", ok, detail);
}

void criterion2() {
    const bool ok = occ::mean_exact({2, 2, 2}) == mpq_class(1, 2) &&
                    occ::variance_exact({2, 2, 2}) == mpq_class(1, 4) &&
                    occ::mean_exact({4, 2, 2}) == mpq_class(3, 4) &&
                    occ::variance_exact({4, 2, 2}) == mpq_class(15, 16) &&
                    occ::mean_exact({3, 3, 2}) == mpq_class(2, 3) &&
                    occ::variance_exact({3, 3, 2}) == mpq_class(2, 9);
    report(2, "closed-form moment spot values", ok);
}

void criterion3() {
    const occ::OccupancyParams params{10, 5, 2};
    const long long trials = 1000000;
    const double mu = occ::mean(params);
    const auto biased = occ::size_biased_pmf(occ::exact_pmf(params));
    const std::size_t katoms = biased.probs.size();

    std::vector<double> y_hist(katoms, 0.0), ys_hist(katoms, 0.0);
    std::vector<double> joint(katoms, 0.0);  // y == ys == k
    double sum_y2 = 0.0, sum_ys = 0.0, sum_id2 = 0.0;
    for (long long i = 0; i < trials; ++i) {
        auto gen = occ::substream(2024, static_cast<std::uint64_t>(i));
        const auto s = occ::sample_coupled(params, gen);
        y_hist[s.y] += 1.0;
        ys_hist[s.y_s] += 1.0;
        if (s.y == s.y_s) joint[s.y] += 1.0;
        const double x = static_cast<double>(s.y) * static_cast<double>(s.y) -
                         mu * static_cast<double>(s.y_s);
        sum_y2 += static_cast<double>(s.y) * static_cast<double>(s.y);
        sum_ys += static_cast<double>(s.y_s);
        sum_id2 += x * x;
    }
    const double nn = static_cast<double>(trials);

    double tv = 0.0;
    for (std::size_t k = 0; k < katoms; ++k)
        tv += std::fabs(ys_hist[k] / nn - biased.probs[k]);
    tv /= 2.0;

    bool identity_ok = true;
    std::string detail = "tv=" + occ::cli::format_double(tv);
    {  // f = id: E[Y*Y] vs mu E[Ys]
        const double diff = sum_y2 / nn - mu * (sum_ys / nn);
        const double se = std::sqrt(
            std::max(0.0, sum_id2 / nn - std::pow(sum_y2 / nn - mu * sum_ys / nn, 2)) /
            nn);
        if (std::fabs(diff) > 4.0 * se) {
            identity_ok = false;
            detail += " id-residual=" + occ::cli::format_double(diff);
        }
    }
    for (std::size_t k = 0; k < katoms; ++k) {  // f = 1{.=k}
        const double kk = static_cast<double>(k);
        const double py = y_hist[k] / nn, pys = ys_hist[k] / nn, pj = joint[k] / nn;
        const double diff = kk * py - mu * pys;
        const double ex2 = kk * kk * py + mu * mu * pys - 2.0 * kk * mu * pj;
        const double se = std::sqrt(std::max(0.0, ex2 - diff * diff) / nn);
        if (std::fabs(diff) > 4.0 * se + 1e-12) {
            identity_ok = false;
            detail += " indicator-residual(k=" + std::to_string(k) +
                      ")=" + occ::cli::format_double(diff);
        }
    }
    report(3, "size-bias law at (10,5,2) with 1e6 coupled samples",
           tv < 0.01 && identity_ok, detail);
}

void criterion4() {
    bool ok = true;
    std::string detail;
    const long long trials = 200000;
    int triple = 0;
    for (const auto& params : {occ::OccupancyParams{2, 2, 2},
                               occ::OccupancyParams{4, 2, 2},
                               occ::OccupancyParams{3, 3, 2}}) {
        const auto exact = occ::exact_pmf(params);
        std::vector<double> emp(exact.probs.size(), 0.0);
        for (long long i = 0; i < trials; ++i) {
            auto gen = occ::substream(777 + triple, static_cast<std::uint64_t>(i));
            emp[occ::sample_coupled(params, gen).y] += 1.0;
        }
        double tv = 0.0;
        for (std::size_t k = 0; k < emp.size(); ++k)
            tv += std::fabs(emp[k] / trials - exact.probs[k]);
        tv /= 2.0;
        detail += (detail.empty() ? "tv=" : ",") + occ::cli::format_double(tv);
        ok = ok && tv < 0.01;
        ++triple;
    }
    report(4, "coupling base marginal matches the exact law", ok, detail);
}

void criterion5() {
    const auto rep = occ::kolmogorov_distance(occ::exact_pmf({4, 2, 2}));
    bool ok = std::fabs(rep.d_k - 0.4057) < 1e-3;
    std::string detail = "d_k=" + occ::cli::format_double(rep.d_k);

    occ::cli::ScanOptions opt;
    opt.m_min = 20;
    opt.m_max = 100;
    opt.m_step = 20;
    for (const auto& [n, m] : occ::cli::scan_grid(opt)) {
        const auto row = occ::cli::scan_point(n, m, opt, 0);
        if (!row.error.empty() || row.d_k < row.lower_bound) {
            ok = false;
            detail += " lower-bound violated at n=" + std::to_string(n) +
                      " m=" + std::to_string(m);
            break;
        }
    }
    report(5, "Kolmogorov distance spot value and universal lower bound", ok, detail);
}

void criterion6() {
    const std::vector<double> ratios = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    double max_small = 0.0, max_full = 0.0;
    for (long long m = 20; m <= 150; m += 10) {
        for (double rho : ratios) {
            const long long n = std::llround(rho * m);
            const occ::OccupancyParams params{n, m, 2};
            const auto rep = occ::kolmogorov_distance(occ::float_pmf(params));
            const double v = rep.d_k * occ::rate(params);
            if (m <= 100) max_small = std::max(max_small, v);
            max_full = std::max(max_full, v);
        }
    }
    const double drift = std::fabs(max_full - max_small) / max_small;
    const bool ok = std::isfinite(max_full) && drift < 0.10;
    report(6, "d_K * r finite and stable on the band 0.5 <= n/m <= 2", ok,
           "max=" + occ::cli::format_double(max_full) +
               " drift=" + occ::cli::format_double(drift));
}

void criterion7() {
    occ::verify::GridSpec grid;
    grid.ratios = {0.5, 1.0, 1.5, 2.0};
    grid.ms = {30, 60, 120, 240};
    occ::verify::VerifyBudget budget;
    budget.psi_samples = 2000;
    const auto c1 = occ::verify::check_condition1(grid, 2, budget);
    const auto c235 = occ::verify::check_condition2_3_5(grid, 2);
    const auto c4 = occ::verify::check_condition4(grid, 2);
    bool ok = c1.pass && c4.sigma_ratio.pass && c4.r_ratio.pass && c4.mu18_holds_from_n1;
    std::string detail = "sup1=" + occ::cli::format_double(c1.fitted_sup);
    for (const auto& rep : c235) {
        ok = ok && rep.pass;
        detail += " sup" + std::to_string(rep.condition_id) + "=" +
                  occ::cli::format_double(rep.fitted_sup);
    }
    detail += " mu-ratio=" + occ::cli::format_double(c4.max_mu_ratio) +
              " n1=" + std::to_string(c4.n1_detected);
    report(7, "coupling conditions give finite, grid-stable suprema", ok, detail);
}

void criterion8() {
    const auto reps = occ::verify::efron_stein_variances({40, 20, 2}, 60000, 0);
    bool ok = true;
    std::string detail;
    for (const auto& rep : reps) {
        ok = ok && rep.ratio <= 1.0 && rep.se_ok;
        detail += std::string(detail.empty() ? "" : " ") + rep.which + "=" +
                  occ::cli::format_double(rep.ratio);
    }
    report(8, "pair-sum variances below their closed-form bounds at (40,20,2)", ok,
           "var/bound: " + detail);
}

void criterion9() {
    const auto rep = occ::verify::check_helper_inequalities();
    report(9, "exact identities and inequalities: zero violations", rep.pass(),
           std::to_string(rep.checks) + " checks, " +
               std::to_string(rep.violations.size()) + " violations" +
               (rep.violations.empty() ? "" : "; first: " + rep.violations.front()));
}

void criterion10() {
    const auto rep = occ::verify::check_variance_structure();
    const bool ok = rep.pass() && rep.phi_inf_min > 0.0;
    report(10, "variance structure: vanishing, boundedness, phi infimum, strip scan",
           ok,
           "phi_inf=" + occ::cli::format_double(rep.phi_inf_min) +
               " c_mu/sigma2=" + occ::cli::format_double(rep.c_mu_over_sigma2) +
               (rep.violations.empty() ? "" : "; first: " + rep.violations.front()));
}

void criterion11() {
    // d = 7 puts the curve n = floor(m log m) inside the valid range at m = 1e4
    const auto rep = occ::verify::check_right_intermediate(7.0, {10000, 100000, 1000000}, 7);
    const bool increasing = rep.r_values.size() == 3 &&
                            rep.r_values[0] < rep.r_values[1] &&
                            rep.r_values[1] < rep.r_values[2];
    const double dev = std::fabs(rep.delta_over_llm.back() - 7.0);
    report(11, "rate grows along the right-intermediate curve (a=7)",
           increasing && dev < 0.1,
           "r=" + occ::cli::format_double(rep.r_values[0]) + "," +
               occ::cli::format_double(rep.r_values[1]) + "," +
               occ::cli::format_double(rep.r_values[2]) +
               " delta/llm=" + occ::cli::format_double(rep.delta_over_llm.back()));
}

void criterion12() {
    occ::cli::ScanOptions opt;
    opt.m_min = 40;
    opt.m_max = 200;  // exercises both the exact and the mc path
    opt.m_step = 80;
    opt.ratio_min = 0.5;
    opt.ratio_max = 1.5;
    opt.ratio_steps = 2;
    opt.mc_samples = 5000;
    opt.seed = 12345;
    std::ostringstream a, b;
    opt.threads = 1;
    occ::cli::run_scan(opt, a);
    opt.threads = 7;
    occ::cli::run_scan(opt, b);
    report(12, "scan output byte-identical across thread counts", a.str() == b.str());
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    const auto secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    std::printf("%d/12 criteria passed in %.1f s\n", 12 - failures, secs);
    return failures == 0 ? 0 : 1;
}
