#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "dyncause/causality.hpp"
#include "dyncause/errors.hpp"
#include "dyncause/rng.hpp"
#include "dyncause/var.hpp"

namespace dyncause {

struct BootstrapConfig {
    long replications = 10000;
    std::vector<double> significance_levels{0.05, 0.10};
    std::uint64_t master_seed = 0;
    unsigned threads = 0;  // 0 -> hardware concurrency
};

struct BootstrapDistribution {
    std::vector<double> values;  // simulated Wald statistics, sorted ascending
    std::map<double, double> critical_values;
    long failures = 0;  // replications discarded for a singular design
};

// Null-model fit: regressors restricted by C are dropped from their
// equations (rows of C select single coefficients, so this is exact), the
// remaining equations keep the unrestricted fit. Leverages are per
// equation because the restricted equation has its own, smaller design.
struct RestrictedFit {
    Eigen::MatrixXd coefficients;  // n x q, zeros in restricted positions
    Eigen::MatrixXd residuals;     // n x T_eff
    Eigen::MatrixXd leverages;     // n x T_eff, row k from equation k's design
};

inline RestrictedFit estimate_restricted(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z,
                                         const Eigen::MatrixXd& C) {
    const long n = Y.rows(), q = Z.rows(), T_eff = Y.cols();
    VarFit full = estimate_var(Y, Z);

    RestrictedFit out;
    out.coefficients = full.coefficients;
    out.residuals = full.residuals;
    out.leverages = full.leverages.transpose().replicate(n, 1);

    // Positions c*n + k dropped from equation k, grouped per equation.
    std::vector<std::vector<long>> dropped(n);
    for (long r = 0; r < C.rows(); ++r)
        for (long c = 0; c < C.cols(); ++c)
            if (C(r, c) != 0.0) dropped[c % n].push_back(c / n);

    for (long k = 0; k < n; ++k) {
        if (dropped[k].empty()) continue;
        std::vector<long> keep;
        for (long c = 0; c < q; ++c)
            if (std::find(dropped[k].begin(), dropped[k].end(), c) == dropped[k].end())
                keep.push_back(c);
        Eigen::MatrixXd Zk(keep.size(), T_eff);
        for (std::size_t i = 0; i < keep.size(); ++i) Zk.row(i) = Z.row(keep[i]);

        Eigen::MatrixXd Gk_inv = spd_inverse(Zk * Zk.transpose(), "restricted design");
        Eigen::RowVectorXd dk = Y.row(k) * Zk.transpose() * Gk_inv;
        out.coefficients.row(k).setZero();
        for (std::size_t i = 0; i < keep.size(); ++i) out.coefficients(k, keep[i]) = dk(i);
        out.residuals.row(k) = Y.row(k) - dk * Zk;
        out.leverages.row(k) =
            (Zk.transpose() * Gk_inv).cwiseProduct(Zk.transpose()).rowwise().sum().transpose();
    }
    return out;
}

// Scale each residual by 1/sqrt(1 - h) so resampled draws have the error
// variance rather than the (smaller) residual variance.
inline Eigen::MatrixXd adjust_residuals(const Eigen::MatrixXd& residuals,
                                        const Eigen::MatrixXd& leverages) {
    if (residuals.rows() != leverages.rows() || residuals.cols() != leverages.cols())
        throw Error("adjust_residuals: shape mismatch");
    Eigen::MatrixXd out(residuals.rows(), residuals.cols());
    for (long i = 0; i < residuals.rows(); ++i)
        for (long t = 0; t < residuals.cols(); ++t) {
            double h = leverages(i, t);
            if (h < 0.0 && h > -1e-10) h = 0.0;  // factorization noise
            if (h < 0.0 || h >= 1.0) throw LeverageOutOfRange(h);
            out(i, t) = residuals(i, t) / std::sqrt(1.0 - h);
        }
    return out;
}

// One bootstrap error sample: whole columns of the adjusted residual pool,
// drawn with replacement (keeps the contemporaneous correlation), then
// centered so each row of the drawn sample has mean exactly zero.
inline Eigen::MatrixXd draw_centered_sample(const Eigen::MatrixXd& pool, std::mt19937_64& eng) {
    const long T_eff = pool.cols();
    Eigen::MatrixXd sample(pool.rows(), T_eff);
    for (long t = 0; t < T_eff; ++t)
        sample.col(t) = pool.col(static_cast<long>(bounded_uint(eng, std::uint64_t(T_eff))));
    sample.colwise() -= sample.rowwise().mean().eval();
    return sample;
}

namespace detail {

// Static partition of [0, count) over worker threads. The work done for
// index i depends only on i (seeds are derived per index), so the split is
// a pure throughput knob.
template <typename F>
void run_parallel(long count, unsigned threads, F&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<long>(count, 1)));
    if (threads <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    const long chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const long lo = w * chunk, hi = std::min<long>(count, lo + chunk);
        workers.emplace_back([&, lo, hi, w] {
            try {
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

// Level-alpha critical value: the k-th largest simulated statistic with
// k = floor(alpha * (N + 1)), clamped into [1, N].
inline double critical_value(const BootstrapDistribution& dist, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("critical_value: alpha must be in (0, 1)");
    const long N = static_cast<long>(dist.values.size());
    if (N < 1) throw Error("critical_value: empty distribution");
    long k = static_cast<long>(std::floor(alpha * double(N + 1)));
    k = std::max<long>(1, std::min<long>(k, N));
    return dist.values[N - k];
}

// Leverage-adjusted residual bootstrap of the Wald statistic under the
// no-causality null. Replication b is seeded by derive_stream(master, b),
// so the distribution is identical for any thread count. Replications whose
// resampled design or covariance is singular are discarded and counted;
// more than 1% of them is an error.
inline BootstrapDistribution run_bootstrap(const Eigen::MatrixXd& data, const VarSpec& spec,
                                           const CausalityHypothesis& hyp,
                                           const BootstrapConfig& cfg) {
    const long T = data.rows(), n = data.cols();
    const int lags = spec.p + spec.d;
    if (cfg.replications < 1) throw Error("bootstrap: need at least one replication");

    auto [Y, Z] = assemble_regressors(data, spec);
    const Eigen::MatrixXd C = build_restriction(spec, n, hyp);
    RestrictedFit restricted = estimate_restricted(Y, Z, C);
    const Eigen::MatrixXd pool = adjust_residuals(restricted.residuals, restricted.leverages);
    const long T_eff = Y.cols();
    const long q = Z.rows();

    std::vector<double> stats(cfg.replications,
                              std::numeric_limits<double>::quiet_NaN());
    detail::run_parallel(cfg.replications, cfg.threads, [&](long b) {
        std::mt19937_64 eng(derive_stream(cfg.master_seed, std::uint64_t(b)));
        Eigen::MatrixXd errors = draw_centered_sample(pool, eng);

        // Rebuild the sample under the null: original presample, then the
        // restricted recursion. Z* is filled on the way.
        Eigen::MatrixXd X = data;
        Eigen::MatrixXd Zb(q, T_eff), Yb(n, T_eff);
        Eigen::VectorXd z(q);
        for (long t = 0; t < T_eff; ++t) {
            const long t0 = lags + t;
            long r = 0;
            if (spec.include_intercept) z(r++) = 1.0;
            for (int l = 1; l <= lags; ++l)
                for (long j = 0; j < n; ++j) z(r++) = X(t0 - l, j);
            Eigen::VectorXd x = restricted.coefficients * z + errors.col(t);
            X.row(t0) = x.transpose();
            Zb.col(t) = z;
            Yb.col(t) = x;
        }
        try {
            VarFit fit = estimate_var(Yb, Zb, spec);
            stats[b] = wald_statistic(fit, C).statistic;
        } catch (const SingularDesign&) {
        } catch (const SingularCovariance&) {
        } catch (const InsufficientObservations&) {
        }
    });

    BootstrapDistribution dist;
    for (double s : stats)
        if (std::isnan(s)) ++dist.failures;
        else dist.values.push_back(s);
    if (dist.failures * 100 > cfg.replications)
        throw TooManySingularReplications(dist.failures, cfg.replications);
    std::sort(dist.values.begin(), dist.values.end());
    for (double a : cfg.significance_levels)
        dist.critical_values[a] = critical_value(dist, a);
    return dist;
}

} // namespace dyncause
