#include <cmath>

#include <doctest.h>
#include <occ/verify.hpp>

using namespace occ::verify;

TEST_CASE("grid generation and refinement") {
    GridSpec grid;
    grid.ratios = {0.5, 1.0, 2.0};
    grid.ms = {10, 20, 40};
    const auto pts = grid.points(2);
    CHECK(pts.size() == 9);
    for (const auto& pt : pts) CHECK(pt.n >= 2);
    const auto fine = grid.refined();
    CHECK(fine.ratios.size() == 5);
    CHECK(fine.ms.size() == 5);
    CHECK(fine.points(2).size() > pts.size());
}

TEST_CASE("moment helpers") {
    CHECK(k_moment(4, 2, 2, 1) == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(k_moment(4, 2, 2, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(l_moment(12, 4, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(l_moment(12, 4, 2) == doctest::Approx(3.0 * 0.75 + 9.0).epsilon(1e-12));
    CHECK_THROWS(l_moment(12, 4, 3));
}

TEST_CASE("moment-form condition suprema are finite and stable on a small grid") {
    GridSpec grid;
    grid.ratios = {0.5, 1.0, 2.0};
    grid.ms = {20, 40, 80};
    const auto reps = check_condition2_3_5(grid, 2);
    REQUIRE(reps.size() == 3);
    for (const auto& rep : reps) {
        CHECK(std::isfinite(rep.fitted_sup));
        CHECK(rep.fitted_sup > 0.0);
        CHECK(rep.values.size() == rep.grid.size());
        CHECK(rep.pass);
    }
    CHECK(reps[0].condition_id == 2);
    CHECK(reps[1].condition_id == 3);
    CHECK(reps[2].condition_id == 5);
}

TEST_CASE("variance-estimate condition on a small grid") {
    GridSpec grid;
    grid.ratios = {1.0, 2.0};
    grid.ms = {15, 30};
    VerifyBudget budget;
    budget.psi_samples = 1500;
    const auto rep = check_condition1(grid, 2, budget);
    CHECK(std::isfinite(rep.fitted_sup));
    CHECK(rep.fitted_sup > 0.0);
}

TEST_CASE("one-urn-removal ratios stay bounded") {
    GridSpec grid;
    grid.ratios = {0.5, 1.0, 2.0};
    grid.ms = {20, 40, 80};
    const auto rep = check_condition4(grid, 2);
    CHECK(rep.sigma_ratio.pass);
    CHECK(rep.r_ratio.pass);
    CHECK(rep.max_mu_ratio > 0.0);
    CHECK(rep.mu18_holds_from_n1);
}

TEST_CASE("pair-sum variance estimates respect the closed-form bounds") {
    const auto reps = efron_stein_variances({24, 12, 2}, 8000, 0);
    for (const auto& rep : reps) {
        CHECK(std::isfinite(rep.var_estimate));
        CHECK(rep.var_estimate >= 0.0);
        CHECK(rep.bound > 0.0);
        CHECK(rep.ratio < 1.0);
    }
}

TEST_CASE("exact identities and inequalities hold on a reduced range") {
    HelperRanges ranges;
    ranges.stirling_max_n = 25;
    ranges.tilt_max_n = 8;
    ranges.hoeffding_max_n = 60;
    const auto rep = check_helper_inequalities(ranges);
    CHECK(rep.checks > 1000);
    CHECK(rep.violations.empty());
}

TEST_CASE("variance-structure checks on a reduced range") {
    VarianceStructureRanges ranges;
    ranges.grid_max_n = 120;
    ranges.grid_max_m = 120;
    ranges.scan_max_m = 2000;
    const auto rep = check_variance_structure(ranges);
    CHECK(rep.pass());
    CHECK(rep.sigma2_vanishes);
    CHECK(rep.phi_inf_located);
    CHECK(rep.phi_inf_min > 0.0);
    CHECK(rep.r1_filter_holds);
    CHECK(rep.c_sigma_over_mu > 0.0);
    CHECK(rep.c_mu_over_sigma2 > 0.0);
}

TEST_CASE("right-intermediate diagnostic along the parametrized curve") {
    // with d = a the curve is n/m = log m, squarely in the right-hand regime
    const auto rep = check_right_intermediate(7.0, {1000, 10000, 100000}, 7);
    REQUIRE(rep.r_values.size() == 3);
    CHECK(rep.r_increasing_tail);
    for (double v : rep.delta_over_llm) CHECK(v == doctest::Approx(7.0).epsilon(0.05));
    CHECK_THROWS(check_right_intermediate(5.0, {1000}, 7));  // needs a > 6
    CHECK_THROWS(check_right_intermediate(7.0, {10000}, 2));  // curve leaves n >= d
}
