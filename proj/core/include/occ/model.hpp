#pragma once

#include <map>
#include <string>

#include <gmpxx.h>

#include "occ/params.hpp"

namespace occ {

struct MomentSummary {
    double mu = 0.0;
    double sigma2 = 0.0;
    double r = 0.0;
};

/// E Y, the expected number of urns with exactly d balls,
/// m * C(n,d) * m^{-d} * (1 - 1/m)^{n-d}, evaluated in log space.
double mean(const OccupancyParams& params);

/// Var Y. The cross term m(m-1) C(n; d,d,n-2d) m^{-2d} (1-2/m)^{n-2d}
/// is zero for d <= n < 2d, and vanishes for m = 2, n > 2d via (1-2/m) = 0.
double variance(const OccupancyParams& params);

/// sigma / (1 + (n/m)^3); the reciprocal of the normal-approximation bound.
double rate(const OccupancyParams& params);

MomentSummary moments(const OccupancyParams& params);

/// Exact-rational mean and variance; practical for n, m up to a few hundred.
mpq_class mean_exact(const OccupancyParams& params);
mpq_class variance_exact(const OccupancyParams& params);

/// Poisson point mass tau_d(x) = e^{-x} x^d / d!, x > 0.
double tau(int d, double x);

/// Variance deflation factor phi_d(x) = 1 - tau_d(x) - tau_d(x)(x-d)^2/x.
double varphi(int d, double x);

/// d/dx phi_d(x) via the closed factorization
/// d! phi_d'(x) = x^{d-2} e^{-x} (x-(d-sqrt d))(x-d)(x-(d+sqrt d)).
double varphi_prime(int d, double x);

/// m * tau_d(n/m) * e^{d/m}; an upper bound on mean().
double mu_upper_bound(const OccupancyParams& params);

/// delta = log m + d log log m - n/m; requires m >= 3.
double delta(const OccupancyParams& params);

enum class DomainLabel {
    LeftHand,
    LeftIntermediate,
    Central,
    RightIntermediate,
    RightHand,
    Indeterminate,
};

const char* to_string(DomainLabel label);

/// Point classification of (n, m) into the classical asymptotic domains.
/// The limiting regimes do not pin down a classification of a single point,
/// so finite thresholds are applied and reported back.
struct DomainThresholds {
    double ratio_lo = 0.01;   // n/m below this: left side
    double ratio_hi = 100.0;  // n/m above this: right side
    double mu_threshold = 50.0;  // mu below this on a side: outer domain
};

struct DomainReport {
    DomainLabel label = DomainLabel::Indeterminate;
    double ratio = 0.0;
    double mu = 0.0;
    double sigma2_over_mu = 0.0;
    double delta = 0.0;  // NaN when m < 3
    DomainThresholds thresholds;
};

DomainReport classify_domain(const OccupancyParams& params,
                             const DomainThresholds& thresholds = {});

/// Estimator of the probability of a new species in a sample enlarged from
/// n0 to n, as the linear combination
///   sum_{d'=1}^{n-n0} C(n-n0-1, d'-1) / C(n, d') * Y^{(d')}
/// over the occupancy counts Y^{(d')}. Binomials are exact big integers.
/// Throws if the counts are inconsistent with n.
double starr_estimator(const std::map<long long, long long>& counts,
                       long long n, long long n0);

}  // namespace occ
