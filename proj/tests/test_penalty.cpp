#include <catch2/catch_amalgamated.hpp>

#include "gpsselect/penalty.hpp"
#include "gpsselect/rng.hpp"

using namespace gps;

TEST_CASE("lasso gradient is identically one") {
    Vec beta(4);
    beta << -3, 0, 2.5, 1e-9;
    Vec g = gradient_abs(PenaltySpec::lasso(), beta);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(g[j] == 1.0);
}

TEST_CASE("elastic net gradient") {
    Vec beta(1);
    beta << 2.0;
    CHECK(gradient_abs(PenaltySpec::elastic_net(0.5), beta)[0] == Catch::Approx(1.5));
    beta << -2.0;
    CHECK(gradient_abs(PenaltySpec::elastic_net(0.5), beta)[0] == Catch::Approx(1.5));
    beta << 0.0;
    CHECK(gradient_abs(PenaltySpec::elastic_net(0.25), beta)[0] == Catch::Approx(0.75));
}

TEST_CASE("generalized elastic net gradient") {
    Vec beta(1);
    beta << 0.0;
    CHECK(gradient_abs(PenaltySpec::gen_elastic_net(0.5), beta)[0] == Catch::Approx(1.0));
    beta << 1.0;
    CHECK(gradient_abs(PenaltySpec::gen_elastic_net(0.5), beta)[0] == Catch::Approx(0.5));
}

TEST_CASE("validate ranges") {
    CHECK_NOTHROW(validate(PenaltySpec::elastic_net(0.0)));  // degenerates to the lasso
    CHECK_NOTHROW(validate(PenaltySpec::elastic_net(1.0)));  // ridge limit
    CHECK_THROWS_AS(validate(PenaltySpec::elastic_net(-0.1)), input_error);
    CHECK_THROWS_AS(validate(PenaltySpec::elastic_net(1.1)), input_error);
    CHECK_THROWS_AS(validate(PenaltySpec::gen_elastic_net(0.0)), input_error);
    CHECK_THROWS_AS(validate(PenaltySpec::gen_elastic_net(1.0)), input_error);
    CHECK_NOTHROW(validate(PenaltySpec::gen_elastic_net(0.5)));
    CHECK_THROWS_AS(validate(PenaltySpec::elastic_net(std::nan(""))), input_error);
    CHECK_THROWS_AS(validate(PenaltySpec::gen_elastic_net(std::nan(""))), input_error);
}

TEST_CASE("elastic net at alpha 0 equals the lasso gradient") {
    Vec beta(3);
    beta << 0.5, -4, 0;
    Vec g = gradient_abs(PenaltySpec::elastic_net(0.0), beta);
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(g[j] == Catch::Approx(1.0));
}

TEST_CASE("gradient depends on beta only through its absolute value") {
    Rng rng(3);
    for (auto spec : {PenaltySpec::lasso(), PenaltySpec::elastic_net(0.7),
                      PenaltySpec::gen_elastic_net(0.3)}) {
        Vec beta(8);
        for (Eigen::Index j = 0; j < 8; ++j) beta[j] = 5.0 * rng.normal();
        Vec g1 = gradient_abs(spec, beta);
        Vec g2 = gradient_abs(spec, beta.cwiseAbs().eval());
        CHECK((g1 - g2).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("monotonicity over |beta| in [0,10]") {
    // convex elastic net: non-decreasing; concave family: non-increasing
    for (double a : {0.1, 0.5, 0.9}) {
        auto enet = PenaltySpec::elastic_net(a);
        auto genet = PenaltySpec::gen_elastic_net(a);
        double prev_e = -1.0, prev_g = 1e300;
        for (int i = 0; i <= 1000; ++i) {
            double b = 0.01 * i;
            double ge = gradient_abs(enet, b);
            double gg = gradient_abs(genet, b);
            CHECK(ge >= prev_e);
            CHECK(gg <= prev_g);
            CHECK(ge > 0.0);
            CHECK(gg > 0.0);
            prev_e = ge;
            prev_g = gg;
        }
    }
}

TEST_CASE("custom gradient plugs in") {
    PenaltySpec spec;
    spec.custom = [](double ab) { return 1.0 / (1.0 + ab); };
    Vec beta(2);
    beta << 0.0, 1.0;
    Vec g = gradient_abs(spec, beta);
    CHECK(g[0] == Catch::Approx(1.0));
    CHECK(g[1] == Catch::Approx(0.5));
}
