#include <catch2/catch_amalgamated.hpp>

#include "gpsselect/sim.hpp"

using namespace gps;

TEST_CASE("example models match the configured shapes") {
    auto [m1, n1] = example_model(1);
    CHECK(n1 == 20);
    CHECK(m1.beta.size() == 8);
    CHECK(m1.beta[0] == 3.0);
    CHECK(m1.beta[7] == 0.0);
    CHECK(m1.sigma == 3.0);

    auto [m4, n4] = example_model(4);
    CHECK(n4 == 100);
    CHECK(m4.beta.size() == 40);
    CHECK(m4.beta[9] == 0.0);
    CHECK(m4.beta[10] == 2.0);
    CHECK(m4.correlation == Correlation::Equi);
    CHECK(m4.sigma == 15.0);

    CHECK_THROWS_AS(example_model(5), input_error);
}

TEST_CASE("run_example is deterministic") {
    SimConfig cfg;
    cfg.example = 1;
    cfg.replicates = 6;
    cfg.seed = 12;
    cfg.criteria = {SimCriterion::Cp, SimCriterion::Gcv};
    cfg.tau2_mode = Tau2Mode::True;
    cfg.path_options.step_budget = 600;

    auto r1 = run_example(cfg);
    auto r2 = run_example(cfg);
    REQUIRE(r1.cells.size() == r2.cells.size());
    for (std::size_t i = 0; i < r1.cells.size(); ++i) {
        CHECK(r1.cells[i].mse == r2.cells[i].mse);
        CHECK(r1.cells[i].se_values == r2.cells[i].se_values);
    }
}

TEST_CASE("noiseless custom model recovers the truth under every criterion") {
    SimConfig cfg;
    cfg.example = 0;
    TrueModel m;
    m.beta = Vec(5);
    m.beta << 2, -1, 0.5, 1, -0.3;
    m.sigma = 0.0;
    cfg.custom_model = m;
    cfg.custom_n = 30;
    cfg.replicates = 4;
    cfg.seed = 5;
    cfg.criteria = {SimCriterion::Aicc, SimCriterion::Gcv};
    cfg.tau2_mode = Tau2Mode::Estimated;  // tau2_hat = 0; aicc/gcv ignore it
    cfg.path_options.step_budget = 2000;

    auto r = run_example(cfg);
    for (const auto& cell : r.cells) {
        CHECK(cell.mse < 1e-2);
        CHECK(cell.nn == 1.0);
        CHECK_FALSE(cell.zz.has_value());  // no true zeros in this model
    }
}

TEST_CASE("zz is reported only when the truth has zeros") {
    SimConfig cfg;
    cfg.example = 2;  // dense truth
    cfg.replicates = 3;
    cfg.seed = 2;
    cfg.criteria = {SimCriterion::Cp};
    cfg.tau2_mode = Tau2Mode::True;
    cfg.path_options.step_budget = 400;
    auto r = run_example(cfg);
    CHECK_FALSE(r.cells[0].zz.has_value());
    CHECK(r.cells[0].nn_den == 3 * 8);

    cfg.example = 1;  // sparse truth
    auto r2 = run_example(cfg);
    REQUIRE(r2.cells[0].zz.has_value());
    CHECK(r2.cells[0].zz_den == 3 * 5);
    CHECK(r2.cells[0].nn_den == 3 * 3);
}

TEST_CASE("example 1 sanity band with a handful of replicates") {
    SimConfig cfg;
    cfg.example = 1;
    cfg.replicates = 10;
    cfg.seed = 77;
    cfg.criteria = {SimCriterion::Cp};
    cfg.tau2_mode = Tau2Mode::True;
    cfg.path_options.step_budget = 2000;
    auto r = run_example(cfg);
    const auto& cell = r.cell("lasso", "cp");
    CHECK(cell.mse > 0.3);
    CHECK(cell.mse < 9.0);
    CHECK(cell.nn > 0.5);
    CHECK(cell.se_values.size() == 10);
}

TEST_CASE("compare_df pairs the two rules on common data") {
    SimConfig cfg;
    cfg.example = 1;
    cfg.replicates = 12;
    cfg.seed = 4;
    cfg.path_options.step_budget = 1500;

    auto cmp = compare_df(cfg);
    CHECK(cmp.gps.se_values.size() == 12);
    CHECK(cmp.zou.se_values.size() == 12);
    double mean = 0.0;
    for (std::size_t r = 0; r < 12; ++r)
        mean += cmp.gps.se_values[r] - cmp.zou.se_values[r];
    mean /= 12.0;
    CHECK(cmp.mean_diff == Catch::Approx(mean).margin(1e-12));

    auto cmp2 = compare_df(cfg);
    CHECK(cmp2.gps.se_values == cmp.gps.se_values);
    CHECK(cmp2.zou.se_values == cmp.zou.se_values);
}

TEST_CASE("bench timing smoke") {
    PathOptions opts;
    opts.step_budget = 300;
    auto rows = bench_timing({60}, 2, opts, 9);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 60);
    CHECK(rows[0].dense_seconds > 0.0);
    CHECK(rows[0].reduced_seconds > 0.0);
    CHECK(rows[0].path_steps > 0);
}
