#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dyncause/errors.hpp"

namespace dyncause {

// Lag structure of the estimated system. `p` lags carry the hypothesis;
// `d` extra lags are estimated but never tested, which keeps the Wald
// statistic chi-squared distributed when the levels are integrated up to
// order d (lag-augmentation approach).
struct VarSpec {
    int p = 1;
    int d = 1;
    bool include_intercept = true;
};

// Inverse of a symmetric PSD matrix via its eigendecomposition, with a
// reciprocal-condition check (reject below 1e-12). The eigendecomposition
// costs little at these sizes and gives an honest condition number.
inline Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& G, const char* context) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lo = ev(0), hi = ev(ev.size() - 1);
    if (!(hi > 0.0) || !(lo / hi > 1e-12))
        throw SingularDesign(std::string(context) + ": reciprocal condition " +
                             std::to_string(hi > 0.0 ? lo / hi : 0.0));
    return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

// Stack Y (n x T_eff) and Z (q x T_eff) for a VAR(p+d) in the given data
// (T x n, rows are time). Column t of Z is [1, x'_{t-1}, ..., x'_{t-p-d}]'.
// `first_index` is the first usable 0-based time index; pass a later one to
// align estimations with different lag counts on a common sample.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> assemble_regressors(
    const Eigen::MatrixXd& data, const VarSpec& spec, long first_index = -1) {
    const long T = data.rows(), n = data.cols();
    const int lags = spec.p + spec.d;
    if (first_index < 0) first_index = lags;
    if (first_index < lags)
        throw Error("assemble_regressors: first index " + std::to_string(first_index) +
                    " precedes lag depth " + std::to_string(lags));
    const long T_eff = T - first_index;
    if (T_eff < 1) throw InsufficientObservations("regressor assembly", T, first_index + 1);
    const long q = (spec.include_intercept ? 1 : 0) + n * lags;

    Eigen::MatrixXd Y(n, T_eff), Z(q, T_eff);
    for (long t = 0; t < T_eff; ++t) {
        const long t0 = first_index + t;
        Y.col(t) = data.row(t0).transpose();
        long r = 0;
        if (spec.include_intercept) Z(r++, t) = 1.0;
        for (int l = 1; l <= lags; ++l)
            for (long j = 0; j < n; ++j) Z(r++, t) = data(t0 - l, j);
    }
    return {Y, Z};
}

// Least-squares fit of Y = D Z + V, equation by equation in one shot.
struct VarFit {
    VarSpec spec;
    Eigen::MatrixXd coefficients;  // n x q
    Eigen::MatrixXd residuals;     // n x T_eff
    Eigen::MatrixXd sigma;         // n x n, V V' / (T_eff - q)
    Eigen::VectorXd leverages;     // T_eff hat-matrix diagonals z_t'(ZZ')^-1 z_t
    Eigen::MatrixXd regressors;    // q x T_eff (kept for the restricted refit)
    Eigen::MatrixXd gram_inverse;  // (Z Z')^-1
    long effective_T = 0;
    long q = 0;
    long n = 0;
};

inline VarFit estimate_var(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z,
                           const VarSpec& spec = VarSpec{}) {
    VarFit fit;
    fit.spec = spec;
    fit.n = Y.rows();
    fit.q = Z.rows();
    fit.effective_T = Y.cols();
    if (Z.cols() != Y.cols())
        throw Error("estimate_var: Y has " + std::to_string(Y.cols()) + " columns, Z has " +
                    std::to_string(Z.cols()));
    // Residuals live in the orthogonal complement of the q regressor rows,
    // so rank(Sigma) <= T_eff - q: a full-rank covariance needs q + n points.
    if (fit.effective_T < fit.q + fit.n)
        throw InsufficientObservations("VAR estimation", fit.effective_T, fit.q + fit.n);

    fit.gram_inverse = spd_inverse(Z * Z.transpose(), "Z Z'");
    fit.coefficients = (Y * Z.transpose()) * fit.gram_inverse;
    fit.residuals = Y - fit.coefficients * Z;
    fit.sigma = fit.residuals * fit.residuals.transpose() /
                double(fit.effective_T - fit.q);
    fit.leverages = (Z.transpose() * fit.gram_inverse).cwiseProduct(Z.transpose()).rowwise().sum();
    fit.regressors = Z;
    return fit;
}

inline VarFit estimate_var(const Eigen::MatrixXd& data, const VarSpec& spec, long first_index) {
    auto [Y, Z] = assemble_regressors(data, spec, first_index);
    return estimate_var(Y, Z, spec);
}

// Lag-order criterion: ln|Sigma| plus a penalty that blends the Schwarz and
// Hannan-Quinn terms, p * (n^2 ln T + 2 n^2 ln ln T) / (2T). Smaller is
// better; the heavy penalty favors parsimonious orders.
inline double hjc(const Eigen::MatrixXd& sigma, int p, long T, long n) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw SingularCovariance("lag criterion needs |Sigma| > 0");
    double log_det = 0.0;
    for (long i = 0; i < sigma.rows(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    const double lt = std::log(double(T));
    const double penalty =
        double(p) * (double(n * n) * lt + 2.0 * double(n * n) * std::log(lt)) / (2.0 * double(T));
    return log_det + penalty;
}

struct LagSelection {
    int p_star = 1;
    std::vector<double> criterion;  // index 0 -> p = 1
};

// Pick the VAR order on the unaugmented system. All candidates are fit on
// the common sample that starts after p_max presample values, so their
// criteria are comparable; ML covariance (divide by the common T) inside
// the criterion. Ties break toward the smaller order.
inline LagSelection select_lag(const Eigen::MatrixXd& data, int p_max, bool intercept = true) {
    const long T = data.rows(), n = data.cols();
    if (p_max < 1) throw Error("select_lag: p_max must be >= 1");
    const long T_common = T - p_max;
    const long q_max = (intercept ? 1 : 0) + n * p_max;
    if (T_common < q_max + n)
        throw InsufficientObservations("lag selection", T, p_max + q_max + n);

    LagSelection sel;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        VarSpec cand{p, 0, intercept};
        auto [Y, Z] = assemble_regressors(data, cand, p_max);
        VarFit fit = estimate_var(Y, Z, cand);
        Eigen::MatrixXd sigma_ml =
            fit.residuals * fit.residuals.transpose() / double(T_common);
        const double value = hjc(sigma_ml, p, T_common, n);
        sel.criterion.push_back(value);
        if (value < best) {  // strict: ties keep the earlier (smaller) order
            best = value;
            sel.p_star = p;
        }
    }
    return sel;
}

} // namespace dyncause
