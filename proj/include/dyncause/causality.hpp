#pragma once

#include <cmath>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "dyncause/errors.hpp"
#include "dyncause/var.hpp"

namespace dyncause {

// Which transformed series enter the bivariate system. `first` applies to
// the cause variable, `second` to the effect variable; raw means the level
// series with no sign decomposition.
enum class ComponentPair { raw, pos_pos, neg_neg, pos_neg, neg_pos };

// Null hypothesis: the `cause` column does not Granger-cause the `effect`
// column. Indices are 0-based positions in the estimated system.
struct CausalityHypothesis {
    long cause = 1;
    long effect = 0;
    ComponentPair components = ComponentPair::raw;
};

// Coefficients are stacked column-by-column of the n x q matrix D, so the
// coefficient of regressor column c in equation k sits at position c*n + k.
inline long coefficient_position(const VarSpec& spec, long n, long equation, long variable,
                                 int lag) {
    const long col = (spec.include_intercept ? 1 : 0) + long(lag - 1) * n + variable;
    return col * n + equation;
}

// Selector matrix with one row per tested lag: row l picks the coefficient
// of the cause variable at lag l in the effect equation. Only the first p
// lags are tested; the d augmentation lags stay unrestricted.
inline Eigen::MatrixXd build_restriction(const VarSpec& spec, long n,
                                         const CausalityHypothesis& hyp) {
    if (hyp.cause < 0 || hyp.cause >= n || hyp.effect < 0 || hyp.effect >= n ||
        hyp.cause == hyp.effect)
        throw Error("restriction: cause/effect indices invalid for n = " + std::to_string(n));
    const long q = (spec.include_intercept ? 1 : 0) + n * (spec.p + spec.d);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(spec.p, n * q);
    for (int l = 1; l <= spec.p; ++l)
        C(l - 1, coefficient_position(spec, n, hyp.effect, hyp.cause, l)) = 1.0;
    return C;
}

// Upper-tail probability of the chi-squared distribution with df degrees of
// freedom, P(X > x).
inline double chi_square_upper_tail(double x, int df) {
    if (df < 1) throw Error("chi_square_upper_tail: df must be >= 1");
    if (!(x > 0.0)) return 1.0;
    return boost::math::gamma_q(double(df) / 2.0, x / 2.0);
}

struct WaldOutcome {
    double statistic = 0.0;
    int df = 0;
    double asymptotic_pvalue = 1.0;
};

// Wald statistic for C vec(D) = 0 with covariance (ZZ')^-1 (x) Sigma. The
// Kronecker product is formed explicitly; at bivariate sizes it is tiny.
inline WaldOutcome wald_statistic(const VarFit& fit, const Eigen::MatrixXd& C) {
    const long n = fit.n, q = fit.q;
    if (C.cols() != n * q)
        throw Error("wald: C has " + std::to_string(C.cols()) + " columns, expected " +
                    std::to_string(n * q));
    Eigen::VectorXd beta(n * q);
    for (long c = 0; c < q; ++c)
        beta.segment(c * n, n) = fit.coefficients.col(c);

    Eigen::MatrixXd cov(n * q, n * q);
    for (long i = 0; i < q; ++i)
        for (long j = 0; j < q; ++j)
            cov.block(i * n, j * n, n, n) = fit.gram_inverse(i, j) * fit.sigma;

    const Eigen::VectorXd g = C * beta;
    Eigen::MatrixXd mid = C * cov * C.transpose();
    Eigen::MatrixXd mid_inv;
    try {
        mid_inv = spd_inverse(mid, "restricted coefficient covariance");
    } catch (const SingularDesign& e) {
        throw SingularCovariance(e.what());
    }
    WaldOutcome out;
    out.statistic = g.dot(mid_inv * g);
    if (out.statistic < 0.0 && out.statistic > -1e-12) out.statistic = 0.0;
    out.df = static_cast<int>(C.rows());
    out.asymptotic_pvalue = chi_square_upper_tail(out.statistic, out.df);
    return out;
}

} // namespace dyncause
