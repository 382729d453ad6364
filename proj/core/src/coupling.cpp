#include "occ/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "occ/rng.hpp"

namespace occ {

namespace {

double log_choose(long long n, long long k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// exact double binomial for small arguments; lgamma is ~1e-14 relative
// accurate but the small cases dominate in the hot paths
double choose_small(long long n, long long k) {
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (long long i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double clamp01(double x) {
    if (x < 0.0) return 0.0;
    if (x > 1.0) return 1.0;
    return x;
}

}  // namespace

Configuration Configuration::from_occupancies(std::vector<long long> occ) {
    Configuration cfg;
    cfg.occupancies = std::move(occ);
    for (long long v : cfg.occupancies) ++cfg.histogram[v];
    return cfg;
}

long long Configuration::balls() const {
    long long total = 0;
    for (const auto& [value, count] : histogram) total += value * count;
    return total;
}

long long Configuration::count_at(long long value) const {
    auto it = histogram.find(value);
    return it == histogram.end() ? 0 : it->second;
}

Configuration sample_multinomial(long long n, long long m, std::mt19937_64& gen) {
    if (n < 0 || m < 1) throw std::domain_error("sample_multinomial: n >= 0, m >= 1");
    std::vector<long long> occ(m, 0);
    long long remaining = n;
    for (long long i = 0; i < m - 1 && remaining > 0; ++i) {
        occ[i] = binomial_draw(gen, remaining, 1.0 / static_cast<double>(m - i));
        remaining -= occ[i];
    }
    occ[m - 1] = remaining;
    return Configuration::from_occupancies(std::move(occ));
}

CoupledSample sample_coupled(const OccupancyParams& params, std::mt19937_64& gen) {
    params.validate();
    const long long n = params.n, m = params.m;
    const long long d = params.d;

    std::uniform_int_distribution<long long> pick(0, m - 1);
    const long long urn = pick(gen);
    const long long mi = binomial_draw(gen, n, 1.0 / static_cast<double>(m));

    // shared core over the other m-1 urns, then the repositioned balls
    Configuration core = sample_multinomial(n - std::max(mi, d), m - 1, gen);
    Configuration moved = sample_multinomial(std::llabs(d - mi), m - 1, gen);

    std::vector<long long> base(m), biased(m);
    base[urn] = mi;
    biased[urn] = d;
    for (long long j = 0, t = 0; j < m; ++j) {
        if (j == urn) continue;
        const long long c = core.occupancies[t];
        const long long r = moved.occupancies[t];
        base[j] = c + (mi < d ? r : 0);
        biased[j] = c + (mi > d ? r : 0);
        ++t;
    }

    CoupledSample s;
    s.m_cfg = Configuration::from_occupancies(std::move(base));
    s.ms_cfg = Configuration::from_occupancies(std::move(biased));
    s.urn_index = urn;
    s.y = s.m_cfg.count_at(d);
    s.y_s = s.ms_cfg.count_at(d);
    s.l = mi;
    s.k = 1 + std::llabs(d - mi);
    s.r_total = std::llabs(d - mi);
    s.v = s.y - (mi == d ? 1 : 0);
    return s;
}

double a_prob(const OccupancyParams& params, long long mi, long long mj) {
    if (params.m < 3) throw std::domain_error("a_prob requires m >= 3");
    if (mi < 0 || mj < 0) return 0.0;
    const long long d = params.d;
    if (!(mi + mj >= 2 * d && mj < d)) return 0.0;
    const long long top = mi - d, pick_count = d - mj;
    if (pick_count > top) return 0.0;
    const double p = params.p(), q = params.q();
    double value;
    if (top <= 40) {
        value = choose_small(top, pick_count) * std::pow(p, static_cast<double>(pick_count)) *
                std::pow(q, static_cast<double>(mi + mj - 2 * d));
    } else {
        value = std::exp(log_choose(top, pick_count) + pick_count * std::log(p) +
                         (mi + mj - 2 * d) * std::log(q));
    }
    return clamp01(value);
}

double b_prob(const OccupancyParams& params, long long mi, long long mj) {
    if (params.m < 3) throw std::domain_error("b_prob requires m >= 3");
    if (mi < 0 || mj < 0) return 0.0;
    const long long n = params.n, d = params.d;
    if (n < 2 * d) return 0.0;
    if (!(mi + mj <= 2 * d && mj > d)) return 0.0;
    if (mj - d > d - mi || mj > n - mi) return 0.0;
    double value;
    if (n <= 60) {
        value = choose_small(n - d, d) * choose_small(d - mi, mj - d) /
                choose_small(n - mi, mj);
    } else {
        value = std::exp(log_choose(n - d, d) + log_choose(d - mi, mj - d) -
                         log_choose(n - mi, mj));
    }
    return clamp01(value);
}

double c_prob(const OccupancyParams& params, long long mi, long long mj) {
    if (params.m < 3) throw std::domain_error("c_prob requires m >= 3");
    if (mj != params.d) return 0.0;
    const long long e = std::llabs(mi - params.d);
    if (e == 0) return 0.0;
    return clamp01(-std::expm1(static_cast<double>(e) * std::log(params.q())));
}

double cond_expectation_diff(const Configuration& cfg, const OccupancyParams& params) {
    if (params.m < 3) throw std::domain_error("cond_expectation_diff requires m >= 3");
    if (cfg.balls() != params.n || cfg.urns() != params.m)
        throw std::invalid_argument("cond_expectation_diff: configuration does not match params");
    const long long d = params.d, m = params.m;

    const long long not_d = m - cfg.count_at(d);

    // sum over ordered pairs i != j of (a+b)(M(i),M(j)) - c(M(i),M(j));
    // the summands only depend on the occupancy values, so run over the
    // histogram and correct for the diagonal
    double pair_sum = 0.0;
    for (const auto& [vi, ci] : cfg.histogram) {
        for (const auto& [vj, cj] : cfg.histogram) {
            const double f = a_prob(params, vi, vj) + b_prob(params, vi, vj) -
                             c_prob(params, vi, vj);
            if (f == 0.0) continue;
            double pairs = static_cast<double>(ci) * static_cast<double>(cj);
            if (vi == vj) pairs -= static_cast<double>(ci);
            pair_sum += f * pairs;
        }
    }
    return (static_cast<double>(not_d) + pair_sum) / static_cast<double>(m);
}

PsiEstimate estimate_psi(const OccupancyParams& params, long long n_samples,
                         std::uint64_t seed) {
    if (n_samples < 2) throw std::domain_error("estimate_psi requires n_samples >= 2");
    params.validate();
    double sum = 0.0, sumsq = 0.0;
    for (long long i = 0; i < n_samples; ++i) {
        auto gen = substream(seed, static_cast<std::uint64_t>(i));
        Configuration cfg = sample_multinomial(params.n, params.m, gen);
        const double v = cond_expectation_diff(cfg, params);
        sum += v;
        sumsq += v * v;
    }
    const double nn = static_cast<double>(n_samples);
    const double var = std::max(0.0, (sumsq - sum * sum / nn) / (nn - 1.0));
    PsiEstimate est;
    est.psi_hat = std::sqrt(var);
    est.std_error = est.psi_hat / std::sqrt(2.0 * (nn - 1.0));
    est.n_samples = n_samples;
    return est;
}

}  // namespace occ
