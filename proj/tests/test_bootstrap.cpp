#include <catch2/catch_amalgamated.hpp>

#include <dyncause/bootstrap.hpp>

#include <random>
#include <set>

using namespace dyncause;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::MatrixXd simulate_null_var1(long T, std::uint64_t seed,
                                   bool skewed = false) {
    // Column 1 never enters column 0's equation, so the no-causality null
    // (1 -> 0) holds by construction.
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::chi_squared_distribution<double> chi(1.0);
    auto draw = [&] {
        return skewed ? (chi(eng) - 1.0) / std::sqrt(2.0) : gauss(eng);
    };
    Eigen::MatrixXd x(T, 2);
    x.row(0).setZero();
    for (long t = 1; t < T; ++t) {
        x(t, 0) = 0.2 + 0.5 * x(t - 1, 0) + draw();
        x(t, 1) = -0.1 + 0.2 * x(t - 1, 0) + 0.3 * x(t - 1, 1) + draw();
    }
    return x;
}

}  // namespace

TEST_CASE("seed stream derivation") {
    // Reference outputs of the splitmix64 generator seeded with 1234567.
    REQUIRE(splitmix64(1234567ULL) == 6457827717110365317ULL);
    REQUIRE(splitmix64(1234567ULL + 0x9e3779b97f4a7c15ULL) ==
            3203168211198807973ULL);

    // Distinct indexes give distinct streams, and the map is reproducible.
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_stream(42, i));
    REQUIRE(seen.size() == 1000);
    REQUIRE(derive_stream(42, 7) == derive_stream(42, 7));
    REQUIRE(derive_stream(42, 7) != derive_stream(43, 7));
}

TEST_CASE("bounded draws stay in range and use rejection only") {
    std::mt19937_64 eng(5);
    for (int i = 0; i < 10000; ++i) REQUIRE(bounded_uint(eng, 7) < 7);
    // bound that divides 2^64 exactly: plain modulo, no rejection region.
    std::mt19937_64 a(9), b(9);
    REQUIRE(bounded_uint(a, 1ULL << 32) == (b() % (1ULL << 32)));
}

TEST_CASE("residual adjustment by leverage") {
    Eigen::MatrixXd r(1, 3), h(1, 3);
    r << 2.0, -4.0, 1.0;
    h << 0.0, 0.75, 0.5;
    Eigen::MatrixXd adj = adjust_residuals(r, h);
    REQUIRE_THAT(adj(0, 0), WithinAbs(2.0, 1e-14));       // untouched at h = 0
    REQUIRE_THAT(adj(0, 1), WithinAbs(-8.0, 1e-12));      // 1/sqrt(0.25) = 2
    REQUIRE_THAT(adj(0, 2), WithinAbs(std::sqrt(2.0), 1e-12));

    // A tiny negative value is rounding noise, a real one is an error.
    h(0, 0) = -1e-12;
    REQUIRE_NOTHROW(adjust_residuals(r, h));
    h(0, 0) = -1e-5;
    REQUIRE_THROWS_AS(adjust_residuals(r, h), LeverageOutOfRange);
    h(0, 0) = 1.0;
    REQUIRE_THROWS_AS(adjust_residuals(r, h), LeverageOutOfRange);
}

TEST_CASE("centered resampling") {
    Eigen::MatrixXd pool(2, 6);
    pool << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0,
            -1.0, 1.0, -1.0, 1.0, -1.0, 1.0;
    std::mt19937_64 eng(1);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::MatrixXd s = draw_centered_sample(pool, eng);
        REQUIRE(s.rows() == 2);
        REQUIRE(s.cols() == 6);
        // Every drawn column is a pool column shifted by the draw's mean.
        REQUIRE(s.rowwise().mean().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("restricted estimation") {
    Eigen::MatrixXd data = simulate_null_var1(80, 303);
    VarSpec spec{1, 1, true};
    auto [Y, Z] = assemble_regressors(data, spec, -1);
    CausalityHypothesis hyp;
    Eigen::MatrixXd C = build_restriction(spec, 2, hyp);
    RestrictedFit rf = estimate_restricted(Y, Z, C);
    VarFit full = estimate_var(Y, Z, spec);

    // The tested coefficient is forced to zero; the other equation keeps
    // its unrestricted fit.
    REQUIRE(rf.coefficients(0, 2) == 0.0);
    REQUIRE((rf.coefficients.row(1) - full.coefficients.row(1))
                .cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE((rf.residuals.row(1) - full.residuals.row(1))
                .cwiseAbs().maxCoeff() < 1e-14);

    // The restricted equation is a least-squares fit on its reduced
    // design: residuals orthogonal to every kept regressor.
    for (long r = 0; r < Z.rows(); ++r) {
        if (r == 2) continue;
        REQUIRE(std::abs(rf.residuals.row(0).dot(Z.row(r))) < 1e-8);
    }
    // Leverage rows trace out each equation's own design size.
    REQUIRE_THAT(rf.leverages.row(0).sum(), WithinAbs(double(Z.rows() - 1), 1e-8));
    REQUIRE_THAT(rf.leverages.row(1).sum(), WithinAbs(double(Z.rows()), 1e-8));
}

TEST_CASE("critical value order statistic") {
    BootstrapDistribution dist;
    for (int i = 1; i <= 100; ++i) dist.values.push_back(double(i));

    // k = floor(alpha (N + 1)) from the top, clamped into [1, N].
    REQUIRE(critical_value(dist, 0.05) == 96.0);   // k = 5 -> values[95]
    REQUIRE(critical_value(dist, 0.10) == 91.0);   // k = 10
    REQUIRE(critical_value(dist, 0.001) == 100.0); // k clamps to 1
    REQUIRE(critical_value(dist, 0.999) == 1.0);   // k clamps to N

    BootstrapDistribution big;
    for (int i = 1; i <= 10000; ++i) big.values.push_back(double(i));
    REQUIRE(critical_value(big, 0.05) == 9501.0);  // k = floor(0.05 * 10001) = 500

    REQUIRE_THROWS_AS(critical_value(dist, 0.0), Error);
    REQUIRE_THROWS_AS(critical_value(dist, 1.0), Error);
    REQUIRE_THROWS_AS(critical_value(BootstrapDistribution{}, 0.05), Error);
}

TEST_CASE("bootstrap distribution") {
    Eigen::MatrixXd data = simulate_null_var1(60, 11);
    VarSpec spec{1, 1, true};
    CausalityHypothesis hyp;
    BootstrapConfig cfg;
    cfg.replications = 400;
    cfg.master_seed = 2024;

    SECTION("deterministic across thread counts") {
        BootstrapConfig one = cfg, four = cfg;
        one.threads = 1;
        four.threads = 4;
        BootstrapDistribution d1 = run_bootstrap(data, spec, hyp, one);
        BootstrapDistribution d4 = run_bootstrap(data, spec, hyp, four);
        REQUIRE(d1.values == d4.values);
        REQUIRE(d1.critical_values == d4.critical_values);
        REQUIRE(d1.failures == 0);
        REQUIRE(d4.failures == 0);
    }

    SECTION("seed changes the draw, config controls the levels") {
        BootstrapConfig other = cfg;
        other.master_seed = 2025;
        other.significance_levels = {0.01, 0.05, 0.25};
        BootstrapDistribution d = run_bootstrap(data, spec, hyp, other);
        REQUIRE(d.values.size() == 400);
        REQUIRE(d.critical_values.size() == 3);
        REQUIRE(d.critical_values.at(0.01) >= d.critical_values.at(0.05));
        REQUIRE(d.critical_values.at(0.05) >= d.critical_values.at(0.25));
        REQUIRE(std::is_sorted(d.values.begin(), d.values.end()));

        BootstrapDistribution same = run_bootstrap(data, spec, hyp, other);
        REQUIRE(same.values == d.values);
        BootstrapDistribution diff = run_bootstrap(data, spec, hyp, cfg);
        REQUIRE(diff.values != d.values);
    }

    SECTION("an unestimable base model is reported, not counted") {
        Eigen::MatrixXd degenerate(30, 2);
        for (long t = 0; t < 30; ++t) {
            degenerate(t, 0) = double(t % 7);
            degenerate(t, 1) = 3.0;  // constant series
        }
        REQUIRE_THROWS_AS(run_bootstrap(degenerate, spec, hyp, cfg), SingularDesign);
    }
}

TEST_CASE("bootstrap test keeps its size under skewed errors") {
    // Small Monte Carlo: null model with shifted chi-squared innovations,
    // nominal 5% test. The acceptance harness runs the full-size version;
    // this is the fast smoke check of the same property.
    VarSpec spec{1, 1, true};
    CausalityHypothesis hyp;
    int rejections = 0;
    const int outer = 120;
    for (int rep = 0; rep < outer; ++rep) {
        Eigen::MatrixXd data = simulate_null_var1(60, 9000 + rep, true);
        VarFit fit = estimate_var(data, spec, -1);
        const Eigen::MatrixXd C = build_restriction(spec, 2, hyp);
        const double wald = wald_statistic(fit, C).statistic;

        BootstrapConfig cfg;
        cfg.replications = 199;
        cfg.master_seed = 7700 + rep;
        cfg.significance_levels = {0.05};
        BootstrapDistribution dist = run_bootstrap(data, spec, hyp, cfg);
        if (wald > dist.critical_values.at(0.05)) ++rejections;
    }
    const double rate = double(rejections) / double(outer);
    REQUIRE(rate >= 0.005);
    REQUIRE(rate <= 0.125);
}
