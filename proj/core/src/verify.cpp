#include "occ/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <gmpxx.h>

#include "occ/coupling.hpp"
#include "occ/model.hpp"
#include "occ/rng.hpp"

namespace occ::verify {

namespace {

double log_choose(long long n, long long k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binom_pmf(long long n, double p, long long j) {
    if (j < 0 || j > n) return 0.0;
    if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return j == n ? 1.0 : 0.0;
    return std::exp(log_choose(n, j) + j * std::log(p) + (n - j) * std::log1p(-p));
}

template <typename F>
ConditionReport build_report(int id, std::string quantity, const GridSpec& grid,
                             int d, F&& value_at) {
    ConditionReport rep;
    rep.condition_id = id;
    rep.quantity = std::move(quantity);
    rep.grid = grid.points(d);
    rep.fitted_sup = 0.0;
    for (const auto& pt : rep.grid) {
        const double v = value_at(pt);
        rep.values.push_back(v);
        rep.fitted_sup = std::max(rep.fitted_sup, v);
    }
    rep.refined_sup = rep.fitted_sup;
    for (const auto& pt : grid.refined().points(d))
        rep.refined_sup = std::max(rep.refined_sup, value_at(pt));
    rep.drift = rep.fitted_sup > 0.0
                    ? std::fabs(rep.refined_sup - rep.fitted_sup) / rep.fitted_sup
                    : 0.0;
    rep.pass = std::isfinite(rep.refined_sup) && rep.drift < 0.10;
    return rep;
}

// stable key for per-point RNG substreams, independent of grid layout
std::uint64_t point_stream(const GridPoint& pt) {
    return splitmix64(static_cast<std::uint64_t>(pt.n) * 0x100000001b3ULL +
                      static_cast<std::uint64_t>(pt.m));
}

mpz_class mpz_choose(long long n, long long k) {
    if (k < 0 || k > n || n < 0) return mpz_class(0);
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

mpq_class mpq_pow(const mpq_class& base, long long e) {
    mpq_class r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
    r.canonicalize();
    return r;
}

mpz_class mpz_pow_ll(long long base, long long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(e));
    return r;
}

}  // namespace

std::vector<GridPoint> GridSpec::points(int d) const {
    std::vector<GridPoint> pts;
    std::set<std::pair<long long, long long>> seen;
    for (long long m : ms) {
        for (double rho : ratios) {
            const long long n = std::llround(rho * static_cast<double>(m));
            if (n < std::max<long long>(d, 1) || m < 2) continue;
            if (seen.insert({n, m}).second) pts.push_back({n, m});
        }
    }
    return pts;
}

GridSpec GridSpec::refined() const {
    GridSpec out;
    auto rs = ratios;
    std::sort(rs.begin(), rs.end());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        out.ratios.push_back(rs[i]);
        if (i + 1 < rs.size()) out.ratios.push_back(0.5 * (rs[i] + rs[i + 1]));
    }
    auto msort = ms;
    std::sort(msort.begin(), msort.end());
    for (std::size_t i = 0; i < msort.size(); ++i) {
        out.ms.push_back(msort[i]);
        if (i + 1 < msort.size() && msort[i + 1] - msort[i] > 1)
            out.ms.push_back((msort[i] + msort[i + 1]) / 2);
    }
    return out;
}

double k_moment(long long n, long long m, int d, int q) {
    const double p = 1.0 / static_cast<double>(m);
    double acc = 0.0;
    for (long long j = 0; j <= n; ++j) {
        const double k = 1.0 + std::fabs(static_cast<double>(d - j));
        acc += std::pow(k, q) * binom_pmf(n, p, j);
    }
    return acc;
}

double l_moment(long long n, long long m, int q) {
    const double mean = static_cast<double>(n) / static_cast<double>(m);
    if (q == 1) return mean;
    if (q == 2) return mean * (1.0 - 1.0 / static_cast<double>(m)) + mean * mean;
    throw std::domain_error("l_moment implemented for q <= 2");
}

ConditionReport check_condition1(const GridSpec& grid, int d, const VerifyBudget& budget) {
    return build_report(1, "r*mu*Psi/sigma^2", grid, d, [&](const GridPoint& pt) {
        OccupancyParams params{pt.n, pt.m, d};
        if (pt.m < 3) return 0.0;
        const MomentSummary ms = moments(params);
        if (ms.sigma2 <= 0.0) return 0.0;
        const auto psi = estimate_psi(params, budget.psi_samples,
                                      budget.seed ^ point_stream(pt));
        return ms.r * ms.mu * psi.psi_hat / ms.sigma2;
    });
}

std::vector<ConditionReport> check_condition2_3_5(const GridSpec& grid, int d) {
    std::vector<ConditionReport> reports;
    reports.push_back(build_report(
        2, "r*mu*k4^(1/2)/sigma^3", grid, d, [&](const GridPoint& pt) {
            OccupancyParams params{pt.n, pt.m, d};
            const MomentSummary ms = moments(params);
            if (ms.sigma2 <= 0.0) return 0.0;
            const double k4 = k_moment(pt.n, pt.m, d, 4);
            return ms.r * ms.mu * std::sqrt(k4) / std::pow(ms.sigma2, 1.5);
        }));
    reports.push_back(build_report(
        3, "r^2*mu*k4^(1/2)*l2^(1/2)/(sigma^3*s)", grid, d, [&](const GridPoint& pt) {
            OccupancyParams params{pt.n, pt.m, d};
            const MomentSummary ms = moments(params);
            if (ms.sigma2 <= 0.0) return 0.0;
            const double k4 = k_moment(pt.n, pt.m, d, 4);
            const double l2 = l_moment(pt.n, pt.m, 2);
            const double s = std::ceil(std::sqrt(static_cast<double>(pt.n)));
            return ms.r * ms.r * ms.mu * std::sqrt(k4) * std::sqrt(l2) /
                   (std::pow(ms.sigma2, 1.5) * s);
        }));
    reports.push_back(build_report(
        5, "r^2*mu*k2/sigma^4", grid, d, [&](const GridPoint& pt) {
            OccupancyParams params{pt.n, pt.m, d};
            const MomentSummary ms = moments(params);
            if (ms.sigma2 <= 0.0) return 0.0;
            const double k2 = k_moment(pt.n, pt.m, d, 2);
            return ms.r * ms.r * ms.mu * k2 / (ms.sigma2 * ms.sigma2);
        }));
    return reports;
}

Condition4Report check_condition4(const GridSpec& grid, int d) {
    Condition4Report out;

    auto sub_moments = [&](long long n, long long m, long long l) {
        return moments(OccupancyParams{n - l, m - 1, d});
    };
    auto max_over_l = [&](const GridPoint& pt, auto&& f) {
        const long long s = static_cast<long long>(
            std::ceil(std::sqrt(static_cast<double>(pt.n))));
        double best = 0.0;
        for (long long l = 0; l <= s && pt.n - l >= d; ++l)
            best = std::max(best, f(pt, l));
        return best;
    };

    out.sigma_ratio = build_report(
        4, "max_l sigma^2(n,m)/sigma^2(n-l,m-1)", grid, d, [&](const GridPoint& pt) {
            if (pt.m < 3) return 0.0;
            const double s2 = variance(OccupancyParams{pt.n, pt.m, d});
            return max_over_l(pt, [&](const GridPoint& p, long long l) {
                const double sub = sub_moments(p.n, p.m, l).sigma2;
                return sub > 0.0 ? s2 / sub : 0.0;
            });
        });
    out.r_ratio = build_report(
        4, "max_l r(n,m)/r(n-l,m-1)", grid, d, [&](const GridPoint& pt) {
            if (pt.m < 3) return 0.0;
            const double r = moments(OccupancyParams{pt.n, pt.m, d}).r;
            return max_over_l(pt, [&](const GridPoint& p, long long l) {
                const double sub = sub_moments(p.n, p.m, l).r;
                return sub > 0.0 ? r / sub : 0.0;
            });
        });

    // empirical n1 for mu_{n,m} <= 18 mu_{n-l,m-1}: the smallest grid n such
    // that the inequality holds at every grid point with at least that n
    std::vector<std::pair<long long, double>> mu_ratios;  // (n, max over l)
    for (const auto& pt : grid.points(d)) {
        if (pt.m < 3) continue;
        const double mu = mean(OccupancyParams{pt.n, pt.m, d});
        const double ratio = max_over_l(pt, [&](const GridPoint& p, long long l) {
            const double sub = mean(OccupancyParams{p.n - l, p.m - 1, d});
            return sub > 0.0 ? mu / sub : 0.0;
        });
        mu_ratios.emplace_back(pt.n, ratio);
        out.max_mu_ratio = std::max(out.max_mu_ratio, ratio);
    }
    std::sort(mu_ratios.begin(), mu_ratios.end());
    long long n1 = 0;
    for (auto it = mu_ratios.rbegin(); it != mu_ratios.rend(); ++it) {
        if (it->second > 18.0) break;
        n1 = it->first;
    }
    out.n1_detected = n1;
    out.mu18_holds_from_n1 = n1 > 0;
    return out;
}

std::array<EfronSteinReport, 3> efron_stein_variances(const OccupancyParams& params,
                                                      long long n_samples,
                                                      std::uint64_t seed) {
    params.validate();
    if (params.m < 3) throw std::domain_error("efron_stein_variances requires m >= 3");

    // running sums for mean, second and fourth moments of each pair sum
    std::array<std::vector<double>, 3> draws;
    for (auto& v : draws) v.reserve(n_samples);

    for (long long i = 0; i < n_samples; ++i) {
        auto gen = substream(seed, static_cast<std::uint64_t>(i));
        const Configuration cfg = sample_multinomial(params.n, params.m, gen);
        double sa = 0.0, sb = 0.0, sc = 0.0;
        for (const auto& [vi, ci] : cfg.histogram) {
            for (const auto& [vj, cj] : cfg.histogram) {
                double pairs = static_cast<double>(ci) * static_cast<double>(cj);
                if (vi == vj) pairs -= static_cast<double>(ci);
                if (pairs <= 0.0) continue;
                sa += pairs * a_prob(params, vi, vj);
                sb += pairs * b_prob(params, vi, vj);
                sc += pairs * c_prob(params, vi, vj);
            }
        }
        draws[0].push_back(sa);
        draws[1].push_back(sb);
        draws[2].push_back(sc);
    }

    const double rho = params.ratio();
    const std::array<double, 3> bounds = {
        static_cast<double>(params.n) * (1.0 + std::pow(rho, 4)),
        static_cast<double>(params.m) * static_cast<double>(params.m) /
            static_cast<double>(params.n),
        static_cast<double>(params.n) * (1.0 + rho * rho),
    };
    const std::array<char, 3> names = {'a', 'b', 'c'};

    std::array<EfronSteinReport, 3> out;
    const double nn = static_cast<double>(n_samples);
    for (int t = 0; t < 3; ++t) {
        double mean_v = 0.0;
        for (double x : draws[t]) mean_v += x;
        mean_v /= nn;
        double m2 = 0.0, m4 = 0.0;
        for (double x : draws[t]) {
            const double c = x - mean_v;
            m2 += c * c;
            m4 += c * c * c * c;
        }
        const double var = m2 / (nn - 1.0);
        m4 /= nn;
        // SE of the sample variance from the fourth central moment
        const double se_var =
            std::sqrt(std::max(0.0, m4 - (nn - 3.0) / (nn - 1.0) * var * var) / nn);
        out[t].which = names[t];
        out[t].var_estimate = var;
        out[t].std_error = se_var;
        out[t].bound = bounds[t];
        out[t].ratio = var / bounds[t];
        out[t].se_ok = var == 0.0 || se_var / var < 0.1;
    }
    return out;
}

namespace helper_detail {

// Stirling numbers of the second kind S(q, j)
std::vector<std::vector<mpz_class>> stirling2(int qmax) {
    std::vector<std::vector<mpz_class>> s(qmax + 1, std::vector<mpz_class>(qmax + 1));
    s[0][0] = 1;
    for (int q = 1; q <= qmax; ++q)
        for (int j = 1; j <= q; ++j)
            s[q][j] = s[q - 1][j - 1] + mpz_class(j) * s[q - 1][j];
    return s;
}

mpq_class binom_pmf_q(long long n, const mpq_class& p, long long j) {
    mpq_class one_minus = 1 - p;
    return mpq_class(mpz_choose(n, j)) * mpq_pow(p, j) * mpq_pow(one_minus, n - j);
}

}  // namespace helper_detail

HelperReport check_helper_inequalities(const HelperRanges& ranges) {
    HelperReport rep;
    auto fail = [&](const std::string& what) { rep.violations.push_back(what); };

    // 1. binomial moments through Stirling numbers of the second kind:
    //    E D^q = sum_j S(q,j) (n)_j p^j, exact rationals
    {
        const auto s2 = helper_detail::stirling2(ranges.stirling_max_q);
        const std::vector<long long> ns = {1, 2, 3, 5, 8, 13, 21, 34, 47, ranges.stirling_max_n};
        const std::vector<mpq_class> ps = {mpq_class(1, 2), mpq_class(1, 3),
                                           mpq_class(1, 5), mpq_class(1, 10)};
        for (long long n : ns) {
            for (const auto& p : ps) {
                for (int q = 1; q <= ranges.stirling_max_q; ++q) {
                    mpq_class direct(0);
                    for (long long j = 0; j <= n; ++j) {
                        mpq_class jq(1);
                        for (int t = 0; t < q; ++t) jq *= mpz_class(static_cast<long>(j));
                        direct += jq * helper_detail::binom_pmf_q(n, p, j);
                    }
                    mpq_class stirling(0);
                    for (int j = 1; j <= q; ++j) {
                        mpz_class falling(1);
                        for (int t = 0; t < j; ++t)
                            falling *= mpz_class(static_cast<long>(n - t));
                        stirling += mpq_class(s2[q][j] * falling) * mpq_pow(p, j);
                    }
                    ++rep.checks;
                    if (direct != stirling) {
                        std::ostringstream os;
                        os << "stirling moment mismatch at n=" << n << " q=" << q;
                        fail(os.str());
                    }
                }
            }
        }
    }

    // 2. 1 + x^{l1} + ... + x^{lj} <= (j + 1{lj < l})(1 + x^l)
    {
        std::vector<double> xs;
        for (int i = 0; i <= 60; ++i) xs.push_back(std::pow(10.0, -3.0 + 0.1 * i));
        for (int l = 1; l <= 6; ++l) {
            for (int l1 = 1; l1 <= l; ++l1) {
                for (int l2 = l1; l2 <= l; ++l2) {
                    for (int l3 = l2; l3 <= l; ++l3) {
                        const int j = 3;
                        const double factor = j + (l3 < l ? 1 : 0);
                        for (double x : xs) {
                            const double lhs = 1.0 + std::pow(x, l1) + std::pow(x, l2) +
                                               std::pow(x, l3);
                            const double rhs = factor * (1.0 + std::pow(x, l));
                            ++rep.checks;
                            if (lhs > rhs * (1.0 + 1e-12)) {
                                std::ostringstream os;
                                os << "polynomial bound fails at x=" << x << " l=(" << l1
                                   << "," << l2 << "," << l3 << ")<=" << l;
                                fail(os.str());
                            }
                        }
                    }
                }
            }
        }
    }

    // 3. C(k, x+l) p^x <= C(k, l) for k <= (l+1)/p + l, and <= 2^k always
    {
        for (long long mm : {3LL, 4LL, 6LL, 11LL}) {
            const mpq_class p(1, static_cast<long>(mm - 1));
            for (long long l = 0; l <= 4; ++l) {
                const long long kcap = (l + 1) * (mm - 1) + l;
                for (long long k = l; k <= std::min<long long>(kcap, 60); ++k) {
                    for (long long x = 0; x <= k - l; ++x) {
                        const mpq_class lhs = mpq_class(mpz_choose(k, x + l)) * mpq_pow(p, x);
                        ++rep.checks;
                        if (lhs > mpq_class(mpz_choose(k, l))) {
                            std::ostringstream os;
                            os << "binomial-shift bound fails at k=" << k << " x=" << x
                               << " l=" << l << " p=1/" << mm - 1;
                            fail(os.str());
                        }
                        if (lhs > mpq_class(mpz_pow_ll(2, k))) {
                            std::ostringstream os;
                            os << "binomial-shift 2^k bound fails at k=" << k;
                            fail(os.str());
                        }
                    }
                }
            }
        }
    }

    // 4. tilt identity E[w^B f(B)] = (1-s+sw)^n E f(B~), exact for indicators
    {
        const std::vector<mpq_class> ss = {mpq_class(1, 4), mpq_class(1, 3), mpq_class(2, 5)};
        const std::vector<mpq_class> ws = {mpq_class(1, 2), mpq_class(1), mpq_class(2),
                                           mpq_class(4)};
        for (long long n = 1; n <= ranges.tilt_max_n; ++n) {
            for (const auto& s : ss) {
                for (const auto& w : ws) {
                    const mpq_class norm = 1 - s + s * w;  // > 0 for w > 0
                    const mpq_class s_tilt = s * w / norm;
                    const mpq_class norm_n = mpq_pow(norm, n);
                    for (long long b = 0; b <= n; ++b) {
                        const mpq_class lhs =
                            mpq_pow(w, b) * helper_detail::binom_pmf_q(n, s, b);
                        const mpq_class rhs =
                            norm_n * helper_detail::binom_pmf_q(n, s_tilt, b);
                        ++rep.checks;
                        if (lhs != rhs) {
                            std::ostringstream os;
                            os << "tilt identity fails at n=" << n << " b=" << b;
                            fail(os.str());
                        }
                    }
                }
            }
        }
    }

    // 5. Hoeffding: P(B_{n,s} > t) <= exp(-2n(t/n - s)^2) for t >= ns
    {
        for (long long n : {5LL, 20LL, 50LL, 100LL, ranges.hoeffding_max_n}) {
            for (double s : {0.1, 0.3, 0.5, 0.7}) {
                for (long long t = static_cast<long long>(std::ceil(n * s)); t <= n; ++t) {
                    double tail = 0.0;
                    for (long long j = t + 1; j <= n; ++j) tail += binom_pmf(n, s, j);
                    const double x = static_cast<double>(t) / static_cast<double>(n) - s;
                    const double bound = std::exp(-2.0 * static_cast<double>(n) * x * x);
                    ++rep.checks;
                    if (tail > bound * (1.0 + 1e-9)) {
                        std::ostringstream os;
                        os << "hoeffding bound fails at n=" << n << " s=" << s << " t=" << t;
                        fail(os.str());
                    }
                }
            }
        }
    }

    // 6. (n+1)[1 + ((n+1)/m)^j] <= 2^{j+1} n [1 + (n/m)^j]
    {
        for (long long n = 1; n <= 100; ++n) {
            for (long long m : {2LL, 3LL, 5LL, 10LL, 25LL, 50LL}) {
                for (int j = 1; j <= 6; ++j) {
                    const double lhs =
                        (n + 1.0) * (1.0 + std::pow((n + 1.0) / m, j));
                    const double rhs = std::pow(2.0, j + 1) * n *
                                       (1.0 + std::pow(static_cast<double>(n) / m, j));
                    ++rep.checks;
                    if (lhs > rhs * (1.0 + 1e-12)) {
                        std::ostringstream os;
                        os << "growth bound fails at n=" << n << " m=" << m << " j=" << j;
                        fail(os.str());
                    }
                }
            }
        }
    }

    return rep;
}

VarianceStructureReport check_variance_structure(const VarianceStructureRanges& ranges) {
    VarianceStructureReport rep;
    const int d = ranges.d;
    auto fail = [&](const std::string& what) { rep.violations.push_back(what); };

    // part 1: for fixed n, sigma^2 decreasing to 0 beyond some m0 as m doubles
    for (long long n : {5LL, 10LL, 20LL}) {
        if (n < d) continue;
        double prev = variance(OccupancyParams{n, 4, d});
        bool started_decreasing = false;
        for (long long m = 8; m <= 1000000; m *= 2) {
            const double cur = variance(OccupancyParams{n, m, d});
            if (cur < prev) started_decreasing = true;
            else if (started_decreasing && cur > prev * (1.0 + 1e-12)) {
                std::ostringstream os;
                os << "sigma^2 not eventually decreasing in m at n=" << n << " m=" << m;
                fail(os.str());
                rep.sigma2_vanishes = false;
            }
            prev = cur;
        }
        // mu at fixed n decays like m^{1-d}; 1e-3 is comfortably past the peak
        if (variance(OccupancyParams{n, 1000000, d}) >= 1e-3) {
            std::ostringstream os;
            os << "sigma^2 did not vanish at n=" << n << " m=1e6";
            fail(os.str());
            rep.sigma2_vanishes = false;
        }
    }

    // part 2: boundedness ratios over a rectangular grid
    for (long long n = std::max<long long>(d, 1); n <= ranges.grid_max_n; n += 3) {
        for (long long m = 2; m <= ranges.grid_max_m; m += 3) {
            if (n < d) continue;
            OccupancyParams params{n, m, d};
            const double mu = mean(params);
            const double s2 = variance(params);
            if (mu > 0.0)
                rep.c_sigma_over_mu = std::max(rep.c_sigma_over_mu, s2 / mu);
            rep.c_mu_over_n = std::max(rep.c_mu_over_n, mu / static_cast<double>(n));
            rep.c_sigma_over_n = std::max(rep.c_sigma_over_n, s2 / static_cast<double>(n));
        }
    }

    // part 3: inf phi_d at d +- sqrt(d), via the factored derivative
    rep.phi_inf_min = std::numeric_limits<double>::infinity();
    for (int dd = 2; dd <= 10; ++dd) {
        const double s = std::sqrt(static_cast<double>(dd));
        const double cand = std::min(varphi(dd, dd - s), varphi(dd, dd + s));
        double grid_min = std::numeric_limits<double>::infinity();
        for (double x = 0.01; x <= 4.0 * dd; x += 0.001)
            grid_min = std::min(grid_min, varphi(dd, x));
        if (grid_min < cand - 1e-9) {
            std::ostringstream os;
            os << "phi_" << dd << " grid min " << grid_min << " below stationary min "
               << cand;
            fail(os.str());
            rep.phi_inf_located = false;
        }
        if (cand <= 0.0) {
            std::ostringstream os;
            os << "phi_" << dd << " infimum not positive";
            fail(os.str());
        }
        // derivative sign changes around the three roots d - sqrt(d), d, d + sqrt(d)
        const double roots[3] = {dd - s, static_cast<double>(dd), dd + s};
        for (double root : roots) {
            if (root <= 0.0) continue;
            const double h = 1e-4 * std::max(1.0, root);
            if (varphi_prime(dd, root - h) * varphi_prime(dd, root + h) > 0.0) {
                std::ostringstream os;
                os << "phi_" << dd << "' does not change sign at x=" << root;
                fail(os.str());
                rep.phi_inf_located = false;
            }
        }
        rep.phi_inf_min = std::min(rep.phi_inf_min, cand);
    }

    // part 4: all points with sigma^2 >= r1 satisfy n/m <= (1+eps) log m,
    // and mu <= C sigma^2 on that set. Scan the violating strip
    // n/m > (1+eps) log m directly: sigma^2 there must stay below r1.
    auto scan_strip = [&](long long m, long long n_step, long long n_limit) {
        const long long n_star = static_cast<long long>(
            std::floor((1.0 + ranges.eps) * m * std::log(static_cast<double>(m)))) + 1;
        double prev = std::numeric_limits<double>::infinity();
        for (long long n = n_star; n <= n_limit; n += n_step) {
            const double s2 = variance(OccupancyParams{n, m, d});
            if (s2 >= ranges.r1) {
                std::ostringstream os;
                os << "sigma^2=" << s2 << ">=r1 with n/m>(1+eps)log m at n=" << n
                   << " m=" << m;
                fail(os.str());
                rep.r1_filter_holds = false;
                return;
            }
            if (s2 < 1e-9 && prev < 1e-9) return;  // decayed, nothing further out
            prev = s2;
        }
    };
    for (long long m = 3; m <= std::min<long long>(ranges.scan_max_m, 2000); ++m)
        scan_strip(m, 1, static_cast<long long>(30.0 * m * std::log(std::max<double>(m, 3))));
    for (long long m = 2001; m <= ranges.scan_max_m;
         m = static_cast<long long>(m * 1.02) + 1)
        scan_strip(m, std::max<long long>(1, m / 50),
                   static_cast<long long>(30.0 * m * std::log(static_cast<double>(m))));

    // mu <= C sigma^2 over the points that pass the sigma^2 >= r1 filter
    for (long long m = 8; m <= ranges.scan_max_m;
         m = static_cast<long long>(m * 1.05) + 1) {
        for (double rho = 0.05; rho <= 1.3 * std::log(static_cast<double>(m)); rho *= 1.1) {
            const long long n = std::llround(rho * m);
            if (n < d) continue;
            OccupancyParams params{n, m, d};
            const double s2 = variance(params);
            if (s2 < ranges.r1) continue;
            rep.c_mu_over_sigma2 = std::max(rep.c_mu_over_sigma2, mean(params) / s2);
        }
    }
    return rep;
}

RightIntermediateReport check_right_intermediate(double a, const std::vector<long long>& ms, int d) {
    if (a <= 6.0) throw std::domain_error("check_right_intermediate requires a > 6");
    RightIntermediateReport rep;
    rep.a = a;
    rep.ms = ms;
    double expansion_min = std::numeric_limits<double>::infinity();
    double expansion_max = -std::numeric_limits<double>::infinity();
    for (long long m : ms) {
        if (m < 16) throw std::domain_error("check_right_intermediate requires m >= 16");
        const double lm = std::log(static_cast<double>(m));
        const double llm = std::log(lm);
        const long long n =
            static_cast<long long>(std::floor(m * (lm + (d - a) * llm)));
        if (n < std::max(d, 1))
            throw std::domain_error(
                "check_right_intermediate: curve gives n < d at m=" + std::to_string(m) +
                "; increase d or start at larger m");
        OccupancyParams params{n, m, d};
        const double r = rate(params);
        rep.r_values.push_back(r);
        rep.delta_over_llm.push_back(delta(params) / llm);
        const double rho = params.ratio();
        const double expansion = 2.0 * std::log(r) -
                                 (lm + (d - 6) * std::log(rho) - rho);
        expansion_min = std::min(expansion_min, expansion);
        expansion_max = std::max(expansion_max, expansion);
    }
    rep.log_r2_expansion_spread = expansion_max - expansion_min;
    rep.r_increasing_tail = rep.r_values.size() >= 3;
    for (std::size_t i = rep.r_values.size() >= 3 ? rep.r_values.size() - 3 : 0;
         i + 1 < rep.r_values.size(); ++i)
        if (rep.r_values[i + 1] <= rep.r_values[i]) rep.r_increasing_tail = false;
    return rep;
}

}  // namespace occ::verify
