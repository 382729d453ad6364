#include <cmath>
#include <cstdlib>

#include <doctest.h>
#include <occ/coupling.hpp>
#include <occ/exact_pmf.hpp>
#include <occ/model.hpp>
#include <occ/rng.hpp>

using occ::OccupancyParams;

TEST_CASE("multinomial sampler conserves balls and urns") {
    auto gen = occ::substream(1, 0);
    for (int i = 0; i < 50; ++i) {
        const auto cfg = occ::sample_multinomial(37, 9, gen);
        CHECK(cfg.balls() == 37);
        CHECK(cfg.urns() == 9);
        long long via_hist = 0;
        for (const auto& [v, c] : cfg.histogram) via_hist += c;
        CHECK(via_hist == 9);
    }
}

TEST_CASE("multinomial sampler first-urn mean is n/m") {
    const long long trials = 20000;
    double sum = 0.0;
    for (long long i = 0; i < trials; ++i) {
        auto gen = occ::substream(7, static_cast<std::uint64_t>(i));
        sum += static_cast<double>(occ::sample_multinomial(24, 6, gen).occupancies[0]);
    }
    CHECK(sum / trials == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("coupled draw structural invariants") {
    OccupancyParams params{12, 5, 2};
    for (int i = 0; i < 2000; ++i) {
        auto gen = occ::substream(3, static_cast<std::uint64_t>(i));
        const auto s = occ::sample_coupled(params, gen);
        CHECK(s.m_cfg.balls() == 12);
        CHECK(s.ms_cfg.balls() == 12);
        CHECK(s.ms_cfg.occupancies[s.urn_index] == 2);  // biased copy pinned at d
        CHECK(s.k == 1 + std::llabs(2 - s.l));
        CHECK(std::llabs(s.y_s - s.y) <= s.k);
        CHECK(std::llabs(s.y - s.v) <= 1);
        CHECK(s.v == s.y - (s.m_cfg.occupancies[s.urn_index] == 2 ? 1 : 0));
    }
}

TEST_CASE("coupled base marginal matches the exact law") {
    OccupancyParams params{6, 3, 2};
    const auto exact = occ::exact_pmf(params);
    std::vector<double> emp(exact.probs.size(), 0.0);
    const long long trials = 40000;
    for (long long i = 0; i < trials; ++i) {
        auto gen = occ::substream(11, static_cast<std::uint64_t>(i));
        emp[occ::sample_coupled(params, gen).y] += 1.0;
    }
    double tv = 0.0;
    for (std::size_t k = 0; k < emp.size(); ++k)
        tv += std::fabs(emp[k] / trials - exact.probs[k]);
    CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("transfer probabilities at the pinned points") {
    CHECK(occ::a_prob({10, 3, 2}, 5, 1) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(occ::b_prob({6, 3, 2}, 1, 3) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(occ::c_prob({10, 3, 2}, 4, 2) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("transfer probabilities vanish off their supports") {
    OccupancyParams p{10, 4, 2};
    CHECK(occ::a_prob(p, 2, 1) == 0.0);  // mi + mj < 2d
    CHECK(occ::a_prob(p, 5, 2) == 0.0);  // mj = d
    CHECK(occ::b_prob(p, 1, 4) == 0.0);  // mi + mj > 2d
    CHECK(occ::b_prob({3, 4, 2}, 0, 3) == 0.0);  // n < 2d kills the b-channel
    CHECK(occ::c_prob(p, 4, 3) == 0.0);  // mj != d
    CHECK(occ::c_prob(p, 2, 2) == 0.0);  // mi = d moves nothing
}

TEST_CASE("conditional difference matches the direct pair sum") {
    OccupancyParams params{20, 7, 2};
    for (int rep = 0; rep < 20; ++rep) {
        auto gen = occ::substream(17, static_cast<std::uint64_t>(rep));
        const auto cfg = occ::sample_multinomial(params.n, params.m, gen);
        double direct = 0.0;
        for (long long i = 0; i < params.m; ++i) {
            for (long long j = 0; j < params.m; ++j) {
                if (i == j) continue;
                direct += occ::a_prob(params, cfg.occupancies[i], cfg.occupancies[j]) +
                          occ::b_prob(params, cfg.occupancies[i], cfg.occupancies[j]) -
                          occ::c_prob(params, cfg.occupancies[i], cfg.occupancies[j]);
            }
        }
        const double expected =
            (static_cast<double>(params.m - cfg.count_at(2)) + direct) /
            static_cast<double>(params.m);
        CHECK(occ::cond_expectation_diff(cfg, params) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("conditional-difference mean recovers E[Ys - Y] = sigma^2 / mu") {
    // E[Ys] - E[Y] = Var Y / E Y under size biasing
    OccupancyParams params{10, 5, 2};
    const long long trials = 30000;
    double sum = 0.0;
    for (long long i = 0; i < trials; ++i) {
        auto gen = occ::substream(23, static_cast<std::uint64_t>(i));
        sum += occ::cond_expectation_diff(
            occ::sample_multinomial(params.n, params.m, gen), params);
    }
    const double expected = occ::variance(params) / occ::mean(params);
    CHECK(sum / trials == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("psi estimate is deterministic in the seed") {
    OccupancyParams params{15, 6, 2};
    const auto e1 = occ::estimate_psi(params, 2000, 99);
    const auto e2 = occ::estimate_psi(params, 2000, 99);
    const auto e3 = occ::estimate_psi(params, 2000, 100);
    CHECK(e1.psi_hat == e2.psi_hat);
    CHECK(e1.psi_hat != e3.psi_hat);
    CHECK(e1.psi_hat > 0.0);
    CHECK(e1.std_error > 0.0);
}
