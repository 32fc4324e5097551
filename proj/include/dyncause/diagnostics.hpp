#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "dyncause/causality.hpp"
#include "dyncause/errors.hpp"
#include "dyncause/var.hpp"

namespace dyncause {

namespace detail {

// Skewness and kurtosis of one series, ML moments.
inline void sample_moments(const Eigen::VectorXd& u, double& sqrt_b1, double& b2) {
    const long N = u.size();
    const double mean = u.mean();
    double m2 = 0, m3 = 0, m4 = 0;
    for (long t = 0; t < N; ++t) {
        const double e = u(t) - mean;
        m2 += e * e;
        m3 += e * e * e;
        m4 += e * e * e * e;
    }
    m2 /= double(N);
    m3 /= double(N);
    m4 /= double(N);
    sqrt_b1 = m3 / std::pow(m2, 1.5);
    b2 = m4 / (m2 * m2);
}

// D'Agostino's transform of sample skewness to an approximate N(0,1).
inline double skewness_z(double sqrt_b1, double N) {
    const double beta2 = 3.0 * (N * N + 27.0 * N - 70.0) * (N + 1.0) * (N + 3.0) /
                         ((N - 2.0) * (N + 5.0) * (N + 7.0) * (N + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
    const double y =
        sqrt_b1 * std::sqrt((w2 - 1.0) * (N + 1.0) * (N + 3.0) / (12.0 * (N - 2.0)));
    return delta * std::log(y + std::sqrt(y * y + 1.0));
}

// Wilson-Hilferty style transform of kurtosis, conditional on skewness, to
// an approximate N(0,1).
inline double kurtosis_z(double sqrt_b1, double b2, double N) {
    const double b1 = sqrt_b1 * sqrt_b1;
    const double d = (N - 3.0) * (N + 1.0) * (N * N + 15.0 * N - 4.0);
    const double a = (N - 2.0) * (N + 5.0) * (N + 7.0) * (N * N + 27.0 * N - 70.0) / (6.0 * d);
    const double c = (N - 7.0) * (N + 5.0) * (N + 7.0) * (N * N + 2.0 * N - 5.0) / (6.0 * d);
    const double k =
        (N + 5.0) * (N + 7.0) * (N * N * N + 37.0 * N * N + 11.0 * N - 313.0) / (12.0 * d);
    const double alpha = a + b1 * c;
    // b2 >= b1 + 1 for any sample (moment inequality); equality only for
    // two-point data, so keep chi away from an exact zero.
    const double chi = std::max((b2 - 1.0 - b1) * 2.0 * k, 1e-300);
    return std::sqrt(9.0 * alpha) *
           (std::cbrt(chi / (2.0 * alpha)) - 1.0 + 1.0 / (9.0 * alpha));
}

} // namespace detail

// Omnibus multivariate normality test (Doornik-Hansen form): standardize,
// rotate through the inverse square root of the correlation matrix so the
// series are uncorrelated, transform each series' skewness and kurtosis to
// approximate standard normals, and sum the squares: chi-squared with 2n
// degrees of freedom under normality. Returns the p-value.
inline double test_normality(const Eigen::MatrixXd& residuals) {
    const long n = residuals.rows(), N = residuals.cols();
    if (N < n + 8) throw InsufficientObservations("normality test", N, n + 8);

    Eigen::MatrixXd centered = residuals.colwise() - residuals.rowwise().mean().eval();
    Eigen::MatrixXd S = centered * centered.transpose() / double(N);
    Eigen::VectorXd sd = S.diagonal().cwiseSqrt();
    for (long i = 0; i < n; ++i)
        if (!(sd(i) > 0.0)) throw SingularCovariance("constant residual series");
    Eigen::MatrixXd R = sd.cwiseInverse().asDiagonal() * S * sd.cwiseInverse().asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    if (es.eigenvalues()(0) < 1e-12)
        throw SingularCovariance("residual correlation matrix is rank deficient");
    Eigen::MatrixXd R_inv_sqrt = es.eigenvectors() *
                                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                 es.eigenvectors().transpose();
    Eigen::MatrixXd U = R_inv_sqrt * (sd.cwiseInverse().asDiagonal() * centered);

    double E = 0.0;
    for (long i = 0; i < n; ++i) {
        double sqrt_b1, b2;
        detail::sample_moments(U.row(i).transpose(), sqrt_b1, b2);
        const double z1 = detail::skewness_z(sqrt_b1, double(N));
        const double z2 = detail::kurtosis_z(sqrt_b1, b2, double(N));
        E += z1 * z1 + z2 * z2;
    }
    return chi_square_upper_tail(E, static_cast<int>(2 * n));
}

namespace detail {

// Trace-form LM statistic shared by the ARCH and autocorrelation tests:
// T * (dim - tr(Sigma_aux * Sigma_null^-1)), where Sigma_aux comes from the
// regression with the extra lag terms and Sigma_null from the one without.
inline double trace_lm(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X_null,
                       const Eigen::MatrixXd& X_aux) {
    const long T = W.cols();
    auto ml_sigma = [T](const Eigen::MatrixXd& dep, const Eigen::MatrixXd& X) {
        Eigen::MatrixXd G_inv = spd_inverse(X * X.transpose(), "diagnostic regression");
        Eigen::MatrixXd resid = dep - (dep * X.transpose()) * G_inv * X;
        return Eigen::MatrixXd(resid * resid.transpose() / double(T));
    };
    Eigen::MatrixXd sigma_null = ml_sigma(W, X_null);
    Eigen::MatrixXd sigma_aux = ml_sigma(W, X_aux);
    Eigen::MatrixXd sigma_null_inv;
    try {
        sigma_null_inv = spd_inverse(sigma_null, "null covariance");
    } catch (const SingularDesign& e) {
        throw SingularCovariance(e.what());
    }
    const double stat = double(T) * (double(W.rows()) - (sigma_aux * sigma_null_inv).trace());
    return std::max(stat, 0.0);
}

} // namespace detail

// Multivariate ARCH LM test of order `order`: stack the unique elements of
// u_t u_t' and regress them on their own lags. Under no conditional
// heteroskedasticity the trace-form LM statistic is chi-squared with
// order * m^2 degrees of freedom, m = n(n+1)/2. Returns the p-value.
inline double test_arch(const Eigen::MatrixXd& residuals, int order = 1) {
    const long n = residuals.rows(), T = residuals.cols();
    if (order < 1) throw Error("arch test: order must be >= 1");
    const long m = n * (n + 1) / 2;
    const long T_aux = T - order;
    if (T_aux <= 1 + m * order)
        throw InsufficientObservations("arch test", T, order + m * order + 2);

    Eigen::MatrixXd W_all(m, T);
    for (long t = 0; t < T; ++t) {
        long r = 0;
        for (long i = 0; i < n; ++i)
            for (long j = 0; j <= i; ++j) W_all(r++, t) = residuals(i, t) * residuals(j, t);
    }

    Eigen::MatrixXd W = W_all.rightCols(T_aux);
    Eigen::MatrixXd X_null = Eigen::MatrixXd::Ones(1, T_aux);
    Eigen::MatrixXd X_aux(1 + m * order, T_aux);
    X_aux.row(0).setOnes();
    for (int l = 1; l <= order; ++l)
        X_aux.middleRows(1 + (l - 1) * m, m) = W_all.middleCols(order - l, T_aux);

    const double stat = detail::trace_lm(W, X_null, X_aux);
    return chi_square_upper_tail(stat, static_cast<int>(order) * static_cast<int>(m * m));
}

// Multivariate LM test for residual autocorrelation up to `lags`: regress
// the residuals on the original regressors plus lagged residuals (presample
// lags zero-padded, so no observations are lost). Chi-squared with
// lags * n^2 degrees of freedom under no autocorrelation. Returns the p-value.
inline double test_autocorrelation(const Eigen::MatrixXd& residuals,
                                   const Eigen::MatrixXd& regressors, int lags = 1) {
    const long n = residuals.rows(), T = residuals.cols(), q = regressors.rows();
    if (lags < 1) throw Error("autocorrelation test: lags must be >= 1");
    if (regressors.cols() != T) throw Error("autocorrelation test: Z/residual shape mismatch");
    if (T <= q + lags * n)
        throw InsufficientObservations("autocorrelation test", T, q + lags * n + 1);

    Eigen::MatrixXd X_aux(q + lags * n, T);
    X_aux.topRows(q) = regressors;
    for (int l = 1; l <= lags; ++l) {
        Eigen::MatrixXd lagged = Eigen::MatrixXd::Zero(n, T);
        lagged.rightCols(T - l) = residuals.leftCols(T - l);
        X_aux.middleRows(q + (l - 1) * n, n) = lagged;
    }

    const double stat = detail::trace_lm(residuals, regressors, X_aux);
    return chi_square_upper_tail(stat, lags * static_cast<int>(n * n));
}

enum class InferenceAdvisory { asymptotic_ok, use_bootstrap };

struct DiagnosticsReport {
    double normality_pvalue = 1.0;
    double arch_pvalue = 1.0;
    double autocorrelation_pvalue = 1.0;
    InferenceAdvisory advisory = InferenceAdvisory::asymptotic_ok;
};

// Residual diagnostics for an estimated system, plus the resulting advice:
// non-normality or ARCH effects at the 5% level mean asymptotic critical
// values are unreliable and the bootstrap ones should be read instead.
inline DiagnosticsReport diagnose(const VarFit& fit) {
    DiagnosticsReport rep;
    rep.normality_pvalue = test_normality(fit.residuals);
    rep.arch_pvalue = test_arch(fit.residuals, 1);
    rep.autocorrelation_pvalue = test_autocorrelation(fit.residuals, fit.regressors, 1);
    rep.advisory = (rep.normality_pvalue < 0.05 || rep.arch_pvalue < 0.05)
                       ? InferenceAdvisory::use_bootstrap
                       : InferenceAdvisory::asymptotic_ok;
    return rep;
}

} // namespace dyncause
