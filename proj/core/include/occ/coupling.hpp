#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "occ/params.hpp"

namespace occ {

/// An occupancy vector together with its histogram
/// (occupancy value -> number of urns holding that many balls).
struct Configuration {
    std::vector<long long> occupancies;
    std::map<long long, long long> histogram;

    static Configuration from_occupancies(std::vector<long long> occ);

    long long balls() const;
    long long urns() const { return static_cast<long long>(occupancies.size()); }
    /// Number of urns with exactly `value` balls, via the histogram.
    long long count_at(long long value) const;
};

/// One joint draw from the size-bias coupling construction: the base
/// configuration M, the size-biased configuration Ms with Ms(I) = d, and the
/// condition variables extracted at sampling time.
struct CoupledSample {
    Configuration m_cfg;
    Configuration ms_cfg;
    long long urn_index = 0;  // I, 0-based
    long long y = 0;          // urns at occupancy d in M
    long long y_s = 0;        // urns at occupancy d in Ms; size-biased law
    long long k = 0;          // 1 + |d - M(I)|, bounds |Ys - Y|
    long long l = 0;          // M(I)
    long long v = 0;          // urns at occupancy d excluding urn I
    long long r_total = 0;    // |d - M(I)|, balls moved between configurations
};

/// Uniform multinomial draw by sequential binomial splitting:
/// urn i receives Binomial(remaining, 1/(urns left)).
Configuration sample_multinomial(long long n, long long m, std::mt19937_64& gen);

/// Joint draw (M, Ms). M(I) ~ Binomial(n, 1/m) with I uniform; the other
/// urns share a multinomial core plus |d - M(I)| repositioned balls that are
/// present in exactly one of the two configurations. Marginally M is
/// multinomial(n, m) and Ys has the Y size-biased law.
CoupledSample sample_coupled(const OccupancyParams& params, std::mt19937_64& gen);

/// P(Ms(j) = d | M) on {M(i) > d}: the chance the excess balls from urn i
/// top urn j up to exactly d. Binomial closed form; requires m >= 3.
double a_prob(const OccupancyParams& params, long long mi, long long mj);

/// P(Ms(j) = d | M) on {M(i) < d}: the chance the balls removed from urn j
/// bring it down to exactly d. Hypergeometric closed form; zero when n < 2d.
double b_prob(const OccupancyParams& params, long long mi, long long mj);

/// P(Ms(j) != d | M) on {M(j) = d}: 1 - q^{|M(i)-d|}.
double c_prob(const OccupancyParams& params, long long mi, long long mj);

/// E[Ys - Y | M], assembled from the a/b/c closed forms. Evaluated over the
/// occupancy histogram in O(V^2 + m), V the number of distinct occupancies.
double cond_expectation_diff(const Configuration& cfg, const OccupancyParams& params);

struct PsiEstimate {
    double psi_hat = 0.0;    // sample sd of E[Ys - Y | M] over configurations
    double std_error = 0.0;  // ~ psi_hat / sqrt(2(N-1))
    long long n_samples = 0;
};

/// Monte-Carlo estimate of sd(E[Ys - Y | M]), the conditional-Jensen
/// majorant of Psi = sd(E[Ys - Y | Y]).
PsiEstimate estimate_psi(const OccupancyParams& params, long long n_samples,
                         std::uint64_t seed);

}  // namespace occ
