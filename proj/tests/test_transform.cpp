#include <catch2/catch_amalgamated.hpp>

#include <dyncause/transform.hpp>

#include <random>

using namespace dyncause;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("drift/trend fit on first differences") {
    SECTION("linear series has unit drift and no trend") {
        Eigen::VectorXd x(3);
        x << 1.0, 2.0, 3.0;
        TrendConfig cfg;
        cfg.mode = TrendMode::drift_and_trend;
        DriftTrendFit fit = fit_drift_trend(x, cfg);
        REQUIRE_THAT(fit.drift, WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(fit.trend, WithinAbs(0.0, 1e-12));
        REQUIRE(fit.shocks.size() == 2);
        REQUIRE(fit.shocks.cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("quadratic levels are absorbed exactly") {
        // x_t = t^2 gives differences 2t + 1, so drift 1 and trend 2.
        Eigen::VectorXd x(5);
        x << 1.0, 4.0, 9.0, 16.0, 25.0;
        TrendConfig cfg;
        cfg.mode = TrendMode::drift_and_trend;
        DriftTrendFit fit = fit_drift_trend(x, cfg);
        REQUIRE_THAT(fit.drift, WithinAbs(1.0, 1e-10));
        REQUIRE_THAT(fit.trend, WithinAbs(2.0, 1e-10));
        REQUIRE(fit.shocks.cwiseAbs().maxCoeff() < 1e-9);
    }

    SECTION("drift-only mode averages the differences") {
        Eigen::VectorXd x(5);
        x << 0.0, 3.0, 8.0, 15.0, 24.0;  // differences 3, 5, 7, 9
        TrendConfig cfg;
        cfg.mode = TrendMode::drift;
        DriftTrendFit fit = fit_drift_trend(x, cfg);
        REQUIRE_THAT(fit.drift, WithinAbs(6.0, 1e-12));
        REQUIRE_THAT(fit.trend, WithinAbs(0.0, 1e-12));
        Eigen::VectorXd expect(4);
        expect << -3.0, -1.0, 1.0, 3.0;
        REQUIRE((fit.shocks - expect).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("mode none keeps the raw differences as shocks") {
        Eigen::VectorXd x(4);
        x << 2.0, 2.5, 1.5, 4.0;
        TrendConfig cfg;
        cfg.mode = TrendMode::none;
        DriftTrendFit fit = fit_drift_trend(x, cfg);
        REQUIRE(fit.drift == 0.0);
        REQUIRE(fit.trend == 0.0);
        REQUIRE_THAT(fit.shocks(0), WithinAbs(0.5, 1e-12));
        REQUIRE_THAT(fit.shocks(2), WithinAbs(2.5, 1e-12));
    }

    SECTION("two observations are not enough") {
        Eigen::VectorXd x(2);
        x << 1.0, 2.0;
        REQUIRE_THROWS_AS(fit_drift_trend(x, TrendConfig{}), InsufficientObservations);
    }
}

TEST_CASE("shock splitting") {
    Eigen::VectorXd shocks(4);
    shocks << 1.5, -2.0, 0.0, 3.0;
    auto [pos, neg] = split_shocks(shocks);
    REQUIRE(pos(0) == 1.5);
    REQUIRE(pos(1) == 0.0);
    REQUIRE(pos(3) == 3.0);
    REQUIRE(neg(0) == 0.0);
    REQUIRE(neg(1) == -2.0);
    REQUIRE((pos + neg - shocks).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(pos.minCoeff() >= 0.0);
    REQUIRE(neg.maxCoeff() <= 0.0);
}

TEST_CASE("partial-sum composition") {
    SECTION("hand-worked two-step example") {
        Eigen::VectorXd pos(2), neg(2);
        pos << 1.0, 0.0;
        neg << 0.0, -1.0;
        ComponentSeries cs = compose_partial_sums(2.0, 0.0, 10.0, pos, neg);
        // Deterministic half at t: 0.5 * (2t + 10) -> 6, 7.
        REQUIRE_THAT(cs.positive(0), WithinAbs(7.0, 1e-12));
        REQUIRE_THAT(cs.positive(1), WithinAbs(8.0, 1e-12));
        REQUIRE_THAT(cs.negative(0), WithinAbs(6.0, 1e-12));
        REQUIRE_THAT(cs.negative(1), WithinAbs(6.0, 1e-12));
        // The two halves add back to the level path x0 + 2t + cum(shocks).
        REQUIRE_THAT(cs.positive(0) + cs.negative(0), WithinAbs(13.0, 1e-12));
        REQUIRE_THAT(cs.positive(1) + cs.negative(1), WithinAbs(14.0, 1e-12));
    }

    SECTION("trend term accumulates t(t+1)/2") {
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
        ComponentSeries cs = compose_partial_sums(0.0, 1.0, 0.0, zero, zero);
        REQUIRE_THAT(cs.positive(0), WithinAbs(0.5, 1e-12));   // 0.5 * 1
        REQUIRE_THAT(cs.positive(1), WithinAbs(1.5, 1e-12));   // 0.5 * 3
        REQUIRE_THAT(cs.positive(2), WithinAbs(3.0, 1e-12));   // 0.5 * 6
    }
}

TEST_CASE("positive and negative components reconstruct the series") {
    std::mt19937_64 eng(20210615);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    for (TrendMode mode :
         {TrendMode::none, TrendMode::drift, TrendMode::drift_and_trend}) {
        for (int rep = 0; rep < 200; ++rep) {
            const long T = 10 + long(eng() % 60);
            const double a = unif(eng), b = 0.1 * unif(eng);
            Eigen::VectorXd x(T);
            x(0) = 5.0 * unif(eng);
            for (long t = 1; t < T; ++t)
                x(t) = x(t - 1) + a + b * double(t) + noise(eng);

            TrendConfig cfg;
            cfg.mode = mode;
            cfg.initial_value = x(0);
            ComponentSeries cs = build_partial_sums(x, cfg);
            REQUIRE(cs.positive.size() == T - 1);
            for (long t = 0; t < T - 1; ++t) {
                const double back = cs.positive(t) + cs.negative(t);
                const double scale = std::max(1.0, std::abs(x(t + 1)));
                REQUIRE(std::abs(back - x(t + 1)) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("natural log transform") {
    Panel p;
    p.dates = {"2000", "2001"};
    p.names = {"a", "b"};
    p.values.resize(2, 2);
    p.values << 1.0, 2.718281828459045, 7.389056098930650, 1.0;

    Panel lp = to_natural_log(p);
    REQUIRE_THAT(lp.values(0, 0), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(lp.values(0, 1), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(lp.values(1, 0), WithinAbs(2.0, 1e-12));

    p.values(1, 1) = 0.0;
    REQUIRE_THROWS_AS(to_natural_log(p), NonPositiveValue);
    p.values(1, 1) = -3.0;
    REQUIRE_THROWS_AS(to_natural_log(p), NonPositiveValue);
}
