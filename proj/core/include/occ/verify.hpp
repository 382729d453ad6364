#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "occ/params.hpp"

namespace occ::verify {

struct GridPoint {
    long long n = 0;
    long long m = 0;
};

/// Rectangular grid over ratios rho = n/m and urn counts m; points are
/// (round(rho*m), m). refined() doubles the density in both directions, the
/// stability proxy used by every "bounded supremum" check.
struct GridSpec {
    std::vector<double> ratios;
    std::vector<long long> ms;

    std::vector<GridPoint> points(int d) const;  // keeps only n >= d points
    GridSpec refined() const;
};

struct ConditionReport {
    int condition_id = 0;
    std::string quantity;
    std::vector<GridPoint> grid;
    std::vector<double> values;     // one per grid point
    double fitted_sup = 0.0;        // max over the base grid
    double refined_sup = 0.0;       // max over the 2x refined grid
    double drift = 0.0;             // |refined - fitted| / fitted
    bool pass = false;              // finite and drift < 0.10
};

struct VerifyBudget {
    long long psi_samples = 4000;         // configurations per point for Psi
    long long efron_stein_samples = 60000;
    std::uint64_t seed = 0;
};

/// Condition 1: r mu Psi / sigma^2 with Psi estimated by Monte Carlo through
/// the configuration-conditioned majorant.
ConditionReport check_condition1(const GridSpec& grid, int d, const VerifyBudget& budget);

/// Conditions 2, 3 and 5 in their sufficient moment forms, using the exact
/// binomial law of M(I): K = 1 + |d - Binomial(n, 1/m)|, L = Binomial(n, 1/m).
///   2: r mu k4^{1/2} / sigma^3
///   3: r^2 mu k4^{1/2} l2^{1/2} / (sigma^3 ceil(sqrt n))
///   5: r^2 mu k2 / sigma^4          (B = 1)
std::vector<ConditionReport> check_condition2_3_5(const GridSpec& grid, int d);

struct Condition4Report {
    ConditionReport sigma_ratio;  // max_l sigma^2_{n,m} / sigma^2_{n-l,m-1}
    ConditionReport r_ratio;      // max_l r_{n,m} / r_{n-l,m-1}
    double max_mu_ratio = 0.0;    // max over points/l of mu_{n,m}/mu_{n-l,m-1}
    long long n1_detected = 0;    // smallest grid n from which mu-ratio <= 18 holds
    bool mu18_holds_from_n1 = false;
};

Condition4Report check_condition4(const GridSpec& grid, int d);

/// Exact q-th moment of K = 1 + |d - Binomial(n, 1/m)|.
double k_moment(long long n, long long m, int d, int q);
/// Exact q-th moment of L = Binomial(n, 1/m), q <= 2.
double l_moment(long long n, long long m, int q);

struct EfronSteinReport {
    char which = 'a';
    double var_estimate = 0.0;
    double std_error = 0.0;  // of the variance estimate
    double bound = 0.0;      // n(1+(n/m)^4), m^2/n, n(1+(n/m)^2)
    double ratio = 0.0;      // var_estimate / bound
    bool se_ok = false;      // std_error / var_estimate < 0.1
};

/// Monte-Carlo variances of the pair sums sum_{i != j} a/b/c over random
/// configurations, against the closed-form bounds.
std::array<EfronSteinReport, 3> efron_stein_variances(const OccupancyParams& params,
                                                      long long n_samples,
                                                      std::uint64_t seed);

struct HelperReport {
    long long checks = 0;
    std::vector<std::string> violations;  // witness points; empty iff pass
    bool pass() const { return violations.empty(); }
};

struct HelperRanges {
    long long stirling_max_n = 60;  // exact binomial moments, q <= 6
    int stirling_max_q = 6;
    long long tilt_max_n = 12;      // exact tilt identity
    long long hoeffding_max_n = 200;
};

/// Exact numerical checks of the helper identities and inequalities:
/// Stirling-number binomial moments, the polynomial bound, the shifted
/// binomial-coefficient bound, the tilt identity, the Hoeffding tail bound
/// and the (n+1)-to-n growth bound. Any violation is a hard failure.
HelperReport check_helper_inequalities(const HelperRanges& ranges = {});

struct VarianceStructureReport {
    // part 1: sigma^2 -> 0 in m at fixed n
    bool sigma2_vanishes = true;
    // part 2: fitted constants for sigma^2/mu, mu/n, sigma^2/n
    double c_sigma_over_mu = 0.0;
    double c_mu_over_n = 0.0;
    double c_sigma_over_n = 0.0;
    // part 3: inf phi_d at d +- sqrt(d), located by derivative sign changes
    bool phi_inf_located = true;
    double phi_inf_min = 0.0;  // min over d in [2,10] of the infimum
    // part 4: sigma^2 >= r1 forces n/m <= (1+eps) log m and mu <= C sigma^2
    bool r1_filter_holds = true;
    double c_mu_over_sigma2 = 0.0;
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

struct VarianceStructureRanges {
    int d = 2;
    long long grid_max_n = 400;
    long long grid_max_m = 400;
    long long scan_max_m = 100000;  // part 4 filter scan
    double r1 = 100.0;
    double eps = 0.25;
};

VarianceStructureReport check_variance_structure(const VarianceStructureRanges& ranges = {});

struct RightIntermediateReport {
    double a = 0.0;
    std::vector<long long> ms;
    std::vector<double> r_values;        // r_{n,m} along n = floor(m(log m + (d-a)loglog m))
    std::vector<double> delta_over_llm;  // delta / log log m
    bool r_increasing_tail = false;      // over the last three m values
    double log_r2_expansion_spread = 0.0;  // spread of log r^2 - [log m + (d-6)log(n/m) - n/m]
};

RightIntermediateReport check_right_intermediate(double a, const std::vector<long long>& ms, int d);

}  // namespace occ::verify
