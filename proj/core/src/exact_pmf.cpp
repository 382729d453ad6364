#include "occ/exact_pmf.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "occ/normal.hpp"

namespace occ {

namespace {

long long kmax_for(const OccupancyParams& p) {
    return p.d >= 1 ? p.n / p.d : p.m;
}

void check_basic(const OccupancyParams& p) {
    if (p.n < 0 || p.m < 1 || p.d < 0)
        throw std::domain_error("exact_pmf requires n >= 0, m >= 1, d >= 0");
}

}  // namespace

// Dynamic program over urns. State: (urns processed, balls used b, urns with
// exactly d balls so far k). Processing the next urn with occupancy o picks
// which of the n-b remaining labeled balls it holds, weight C(n-b, o).
// Exact mode accumulates assignment counts; probabilities are counts / m^n.
ExactPmf exact_pmf(const OccupancyParams& params, const PmfBudget& budget) {
    check_basic(params);
    if (params.n > budget.max_n || params.m > budget.max_m)
        throw BudgetExceeded("exact_pmf: n=" + std::to_string(params.n) +
                             ", m=" + std::to_string(params.m) +
                             " exceeds the rational-mode budget (n,m <= " +
                             std::to_string(budget.max_n) + "," +
                             std::to_string(budget.max_m) + "); use float mode");
    const long long n = params.n, m = params.m;
    const int d = params.d;
    const long long kmax = kmax_for(params);

    // Pascal triangle rows 0..n
    std::vector<std::vector<mpz_class>> choose(n + 1);
    for (long long i = 0; i <= n; ++i) {
        choose[i].resize(i + 1);
        choose[i][0] = 1;
        for (long long j = 1; j <= i; ++j)
            choose[i][j] = choose[i - 1][j - 1] + (j < i ? choose[i - 1][j] : mpz_class(0));
    }

    // dp[k][b]: weighted count over the urns processed so far
    auto make_table = [&] {
        return std::vector<std::vector<mpz_class>>(kmax + 1,
                                                   std::vector<mpz_class>(n + 1));
    };
    auto dp = make_table();
    dp[0][0] = 1;
    for (long long urn = 0; urn < m; ++urn) {
        auto next = make_table();
        for (long long k = 0; k <= kmax; ++k) {
            for (long long b = 0; b <= n; ++b) {
                const mpz_class& val = dp[k][b];
                if (val == 0) continue;
                const auto& row = choose[n - b];
                for (long long o = 0; o + b <= n; ++o) {
                    long long k2 = k + (o == d ? 1 : 0);
                    if (k2 > kmax) continue;
                    mpz_addmul(next[k2][b + o].get_mpz_t(), val.get_mpz_t(),
                               row[o].get_mpz_t());
                }
            }
        }
        dp.swap(next);
    }

    mpz_class total;
    mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(m),
                  static_cast<unsigned long>(n));

    ExactPmf pmf;
    pmf.params = params;
    pmf.mode = PmfMode::Exact;
    pmf.probs_q.assign(m + 1, mpq_class(0));
    pmf.probs.assign(m + 1, 0.0);
    for (long long k = 0; k <= kmax && k <= m; ++k) {
        mpq_class q(dp[k][n], total);
        q.canonicalize();
        pmf.probs_q[k] = q;
        pmf.probs[k] = q.get_d();
    }
    return pmf;
}

// Same recursion in probability space: dp[k][b] is the probability that the
// urns processed so far hold b balls in total with k of them at occupancy d.
// Transition weight C(n-b, o) m^{-o} is built multiplicatively per ball so it
// never overflows for moderate n/m.
ExactPmf float_pmf(const OccupancyParams& params) {
    check_basic(params);
    const long long n = params.n, m = params.m;
    const int d = params.d;
    const long long kmax = kmax_for(params);
    const double inv_m = 1.0 / static_cast<double>(m);

    auto make_table = [&] {
        return std::vector<std::vector<double>>(kmax + 1,
                                                std::vector<double>(n + 1, 0.0));
    };
    auto dp = make_table();
    dp[0][0] = 1.0;
    std::vector<double> w(n + 1);
    for (long long urn = 0; urn < m; ++urn) {
        auto next = make_table();
        for (long long b = 0; b <= n; ++b) {
            const long long rem = n - b;
            w[0] = 1.0;
            for (long long o = 1; o <= rem; ++o)
                w[o] = w[o - 1] * (static_cast<double>(rem - o + 1) * inv_m /
                                   static_cast<double>(o));
            for (long long k = 0; k <= kmax; ++k) {
                const double val = dp[k][b];
                if (val == 0.0) continue;
                auto& same = next[k];
                for (long long o = 0; o <= rem; ++o) {
                    if (o == d) continue;
                    same[b + o] += val * w[o];
                }
                if (d <= rem && k + 1 <= kmax) next[k + 1][b + d] += val * w[d];
            }
        }
        dp.swap(next);
    }

    ExactPmf pmf;
    pmf.params = params;
    pmf.mode = PmfMode::Float;
    pmf.probs.assign(m + 1, 0.0);
    double sum = 0.0;
    for (long long k = 0; k <= kmax && k <= m; ++k) {
        pmf.probs[k] = dp[k][n];
        sum += dp[k][n];
    }
    if (sum > 0.0)
        for (auto& p : pmf.probs) p /= sum;
    return pmf;
}

ExactPmf auto_pmf(const OccupancyParams& params, const PmfBudget& budget) {
    if (params.n <= budget.max_n && params.m <= budget.max_m)
        return exact_pmf(params, budget);
    return float_pmf(params);
}

std::pair<mpq_class, mpq_class> exact_moments(const ExactPmf& pmf) {
    if (pmf.mode != PmfMode::Exact)
        throw std::logic_error("exact_moments requires an exact-mode pmf");
    mpq_class m1(0), m2(0);
    for (std::size_t k = 0; k < pmf.probs_q.size(); ++k) {
        mpq_class kq(static_cast<long>(k));
        m1 += kq * pmf.probs_q[k];
        m2 += kq * kq * pmf.probs_q[k];
    }
    return {m1, m2 - m1 * m1};
}

std::pair<double, double> moments_of(const ExactPmf& pmf) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < pmf.probs.size(); ++k) {
        m1 += static_cast<double>(k) * pmf.probs[k];
        m2 += static_cast<double>(k) * static_cast<double>(k) * pmf.probs[k];
    }
    return {m1, m2 - m1 * m1};
}

ExactPmf size_biased_pmf(const ExactPmf& pmf) {
    ExactPmf out;
    out.params = pmf.params;
    out.mode = pmf.mode;
    out.probs.assign(pmf.probs.size(), 0.0);
    if (pmf.mode == PmfMode::Exact) {
        auto [mu, var] = exact_moments(pmf);
        (void)var;
        if (mu == 0) throw std::domain_error("size_biased_pmf: zero mean");
        out.probs_q.assign(pmf.probs_q.size(), mpq_class(0));
        for (std::size_t k = 0; k < pmf.probs_q.size(); ++k) {
            out.probs_q[k] = mpq_class(static_cast<long>(k)) * pmf.probs_q[k] / mu;
            out.probs[k] = out.probs_q[k].get_d();
        }
    } else {
        auto [mu, var] = moments_of(pmf);
        (void)var;
        if (mu <= 0.0) throw std::domain_error("size_biased_pmf: zero mean");
        for (std::size_t k = 0; k < pmf.probs.size(); ++k)
            out.probs[k] = static_cast<double>(k) * pmf.probs[k] / mu;
    }
    return out;
}

KolmogorovReport kolmogorov_distance(const ExactPmf& pmf) {
    auto [mu, var] = moments_of(pmf);
    if (var <= 0.0) throw std::domain_error("kolmogorov_distance: zero variance");
    const double sigma = std::sqrt(var);

    KolmogorovReport rep;
    rep.mu = mu;
    rep.sigma = sigma;
    rep.lower_bound = 0.087 / std::max(3.0, sigma);

    double cdf = 0.0;
    double best = -1.0;
    for (std::size_t k = 0; k < pmf.probs.size(); ++k) {
        const double w = (static_cast<double>(k) - mu) / sigma;
        const double phi = normal_cdf(w);
        const double left = std::fabs(cdf - phi);  // F(k-) vs Phi(w_k)
        cdf += pmf.probs[k];
        const double right = std::fabs(cdf - phi);  // F(k) vs Phi(w_k)
        if (left > best) {
            best = left;
            rep.arg_atom = static_cast<long long>(k);
            rep.left_limit = true;
        }
        if (right > best) {
            best = right;
            rep.arg_atom = static_cast<long long>(k);
            rep.left_limit = false;
        }
    }
    rep.d_k = best;
    return rep;
}

void write_pmf_csv(const ExactPmf& pmf, std::ostream& out) {
    // zero atoms are omitted: the support is all the csv needs to carry
    if (pmf.mode == PmfMode::Exact) {
        out << "k,probability_numerator,probability_denominator\n";
        for (std::size_t k = 0; k < pmf.probs_q.size(); ++k) {
            if (pmf.probs_q[k] == 0) continue;
            out << k << ',' << pmf.probs_q[k].get_num().get_str() << ','
                << pmf.probs_q[k].get_den().get_str() << '\n';
        }
    } else {
        out << "k,probability\n";
        char buf[64];
        for (std::size_t k = 0; k < pmf.probs.size(); ++k) {
            if (pmf.probs[k] == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%.17g", pmf.probs[k]);
            out << k << ',' << buf << '\n';
        }
    }
}

std::string pmf_to_json(const ExactPmf& pmf) {
    nlohmann::json j;
    j["n"] = pmf.params.n;
    j["m"] = pmf.params.m;
    j["d"] = pmf.params.d;
    j["mode"] = pmf.mode == PmfMode::Exact ? "exact" : "float";
    j["probs"] = pmf.probs;
    if (pmf.mode == PmfMode::Exact) {
        nlohmann::json q = nlohmann::json::array();
        for (const auto& p : pmf.probs_q)
            q.push_back({{"num", p.get_num().get_str()}, {"den", p.get_den().get_str()}});
        j["probs_rational"] = std::move(q);
    }
    return j.dump(2);
}

}  // namespace occ
