#include "occ/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace occ {

namespace {

// long double throughout: the variance assembles mu + cross - mu^2 with
// heavy cancellation, which amplifies any noise in the individual terms
long double log_choose(long long n, long long k) {
    if (k < 0 || k > n) return -std::numeric_limits<long double>::infinity();
    return std::lgammal(static_cast<long double>(n) + 1.0L) -
           std::lgammal(static_cast<long double>(k) + 1.0L) -
           std::lgammal(static_cast<long double>(n - k) + 1.0L);
}

long double mean_l(const OccupancyParams& params) {
    const auto [n, m, d] = params;
    const long double lg =
        std::log(static_cast<long double>(m)) + log_choose(n, d) -
        d * std::log(static_cast<long double>(m)) +
        static_cast<long double>(n - d) * std::log1p(-1.0L / static_cast<long double>(m));
    return std::exp(lg);
}

mpz_class mpz_choose(long long n, long long k) {
    if (k < 0 || k > n || n < 0) return mpz_class(0);
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

mpq_class mpq_pow(const mpq_class& base, long long e) {
    mpq_class r(1);
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
    r.canonicalize();
    return r;
}

}  // namespace

double mean(const OccupancyParams& params) {
    params.validate();
    return static_cast<double>(mean_l(params));
}

double variance(const OccupancyParams& params) {
    params.validate();
    const auto [n, m, d] = params;
    const long double mu = mean_l(params);
    long double cross = 0.0L;
    if (n >= 2 * d && m >= 3) {
        // m(m-1) * n!/(d! d! (n-2d)!) * m^{-2d} * (1-2/m)^{n-2d}
        const long double lg =
            std::log(static_cast<long double>(m)) +
            std::log(static_cast<long double>(m - 1)) +
            std::lgammal(static_cast<long double>(n) + 1.0L) -
            2.0L * std::lgammal(static_cast<long double>(d) + 1.0L) -
            std::lgammal(static_cast<long double>(n - 2 * d) + 1.0L) -
            2.0L * d * std::log(static_cast<long double>(m)) +
            static_cast<long double>(n - 2 * d) *
                std::log1p(-2.0L / static_cast<long double>(m));
        cross = std::exp(lg);
    }
    // cross stays zero for d <= n < 2d, and for m=2 with n > 2d where
    // (1-2/m)^{n-2d} = 0; n = 2d, m = 2 has (1-2/m)^0 = 1 and is kept.
    if (n == 2 * d && m == 2) {
        const long double lg = std::log(2.0L) +
                               std::lgammal(static_cast<long double>(n) + 1.0L) -
                               2.0L * std::lgammal(static_cast<long double>(d) + 1.0L) -
                               2.0L * d * std::log(2.0L);
        cross = std::exp(lg);
    }
    const long double v = mu + cross - mu * mu;
    return v < 0.0L ? 0.0 : static_cast<double>(v);
}

double rate(const OccupancyParams& params) {
    const double s2 = variance(params);
    if (s2 <= 0.0) throw std::domain_error("rate requires positive variance");
    const double rho = params.ratio();
    return std::sqrt(s2) / (1.0 + rho * rho * rho);
}

MomentSummary moments(const OccupancyParams& params) {
    MomentSummary s;
    s.mu = mean(params);
    s.sigma2 = variance(params);
    const double rho = params.ratio();
    s.r = std::sqrt(s.sigma2) / (1.0 + rho * rho * rho);
    return s;
}

mpq_class mean_exact(const OccupancyParams& params) {
    params.validate();
    const auto [n, m, d] = params;
    mpq_class r(mpz_choose(n, d));
    r *= mpz_class(static_cast<long>(m));
    r /= mpq_pow(mpq_class(static_cast<long>(m)), d);
    r *= mpq_pow(mpq_class(static_cast<long>(m - 1), static_cast<long>(m)), n - d);
    return r;
}

mpq_class variance_exact(const OccupancyParams& params) {
    params.validate();
    const auto [n, m, d] = params;
    const mpq_class mu = mean_exact(params);
    mpq_class cross(0);
    if (n >= 2 * d) {
        mpz_class multi = mpz_choose(n, d) * mpz_choose(n - d, d);
        cross = mpq_class(multi) * mpz_class(static_cast<long>(m)) *
                mpz_class(static_cast<long>(m - 1));
        cross /= mpq_pow(mpq_class(static_cast<long>(m)), 2 * d);
        // zero when m=2 and n>2d; (m-2)/m to the zeroth power is 1
        cross *= mpq_pow(mpq_class(static_cast<long>(m - 2), static_cast<long>(m)), n - 2 * d);
    }
    return mu + cross - mu * mu;
}

double tau(int d, double x) {
    if (x <= 0.0) throw std::domain_error("tau requires x > 0");
    return std::exp(-x + d * std::log(x) - std::lgamma(d + 1.0));
}

double varphi(int d, double x) {
    const double t = tau(d, x);
    const double e = x - d;
    return 1.0 - t - t * e * e / x;
}

double varphi_prime(int d, double x) {
    if (x <= 0.0) throw std::domain_error("varphi_prime requires x > 0");
    const double s = std::sqrt(static_cast<double>(d));
    const double lead = std::exp((d - 2) * std::log(x) - x - std::lgamma(d + 1.0));
    return lead * (x - (d - s)) * (x - d) * (x - (d + s));
}

double mu_upper_bound(const OccupancyParams& params) {
    const double x = params.ratio();
    // tau_d(0) := lim_{x->0+} tau_d(x), which is 1 for d = 0 and 0 otherwise
    const double t = x > 0.0 ? tau(params.d, x) : (params.d == 0 ? 1.0 : 0.0);
    return static_cast<double>(params.m) * t *
           std::exp(params.d / static_cast<double>(params.m));
}

double delta(const OccupancyParams& params) {
    if (params.m < 3) throw std::domain_error("delta requires m >= 3");
    const double lm = std::log(static_cast<double>(params.m));
    return lm + params.d * std::log(lm) - params.ratio();
}

const char* to_string(DomainLabel label) {
    switch (label) {
        case DomainLabel::LeftHand: return "left-hand";
        case DomainLabel::LeftIntermediate: return "left-intermediate";
        case DomainLabel::Central: return "central";
        case DomainLabel::RightIntermediate: return "right-intermediate";
        case DomainLabel::RightHand: return "right-hand";
        case DomainLabel::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

DomainReport classify_domain(const OccupancyParams& params,
                             const DomainThresholds& thresholds) {
    params.validate();
    DomainReport rep;
    rep.thresholds = thresholds;
    rep.ratio = params.ratio();
    rep.mu = mean(params);
    const double s2 = variance(params);
    rep.sigma2_over_mu = rep.mu > 0.0 ? s2 / rep.mu : 0.0;
    rep.delta = params.m >= 3 ? delta(params) : std::numeric_limits<double>::quiet_NaN();

    if (!(thresholds.ratio_lo > 0.0) || !(thresholds.ratio_hi > thresholds.ratio_lo)) {
        rep.label = DomainLabel::Indeterminate;
        return rep;
    }
    if (rep.ratio < thresholds.ratio_lo) {
        rep.label = rep.mu < thresholds.mu_threshold ? DomainLabel::LeftHand
                                                     : DomainLabel::LeftIntermediate;
    } else if (rep.ratio > thresholds.ratio_hi) {
        rep.label = rep.mu < thresholds.mu_threshold ? DomainLabel::RightHand
                                                     : DomainLabel::RightIntermediate;
    } else {
        rep.label = DomainLabel::Central;
    }
    return rep;
}

double starr_estimator(const std::map<long long, long long>& counts,
                       long long n, long long n0) {
    if (n0 < 1 || n <= n0) throw std::domain_error("starr_estimator requires n > n0 >= 1");
    long long total = 0;
    for (const auto& [occupancy, cnt] : counts) {
        if (occupancy < 0 || cnt < 0)
            throw std::domain_error("starr_estimator: negative occupancy or count");
        total += occupancy * cnt;
    }
    if (total != n)
        throw std::invalid_argument("starr_estimator: counts sum to " + std::to_string(total) +
                                    ", expected n = " + std::to_string(n));
    mpq_class acc(0);
    for (const auto& [occupancy, cnt] : counts) {
        if (occupancy < 1 || occupancy > n - n0 || cnt == 0) continue;
        mpq_class term(mpz_choose(n - n0 - 1, occupancy - 1), mpz_choose(n, occupancy));
        term.canonicalize();
        acc += term * mpz_class(static_cast<long>(cnt));
    }
    return acc.get_d();
}

}  // namespace occ
