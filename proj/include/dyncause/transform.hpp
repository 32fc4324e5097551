#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "dyncause/errors.hpp"
#include "dyncause/panel.hpp"

namespace dyncause {

// Deterministic terms removed from the first differences before the
// cumulative positive/negative decomposition.
enum class TrendMode { none, drift, drift_and_trend };

struct TrendConfig {
    TrendMode mode = TrendMode::drift_and_trend;
    // Level the reconstructed components are anchored at; by convention the
    // decomposition starts from 0 unless the caller pins the actual x_0.
    double initial_value = 0.0;
};

inline Panel to_natural_log(const Panel& p) {
    Panel out = p;
    for (long t = 0; t < p.rows(); ++t)
        for (long j = 0; j < p.cols(); ++j) {
            if (!(p.values(t, j) > 0.0)) throw NonPositiveValue(t + 1, j + 1, p.values(t, j));
            out.values(t, j) = std::log(p.values(t, j));
        }
    return out;
}

struct DriftTrendFit {
    double drift = 0.0;  // intercept of the difference equation
    double trend = 0.0;  // slope on t = 1..T-1
    Eigen::VectorXd shocks;  // residuals, length T-1
};

// OLS of the first differences on (1, t), t = 1..T-1, per the configured
// mode. Closed-form 2x2 normal equations; no factorization needed.
inline DriftTrendFit fit_drift_trend(const Eigen::VectorXd& series, const TrendConfig& cfg) {
    const long T = series.size();
    if (T < 3) throw InsufficientObservations("drift/trend fit", T, 3);
    const long m = T - 1;
    Eigen::VectorXd diff(m);
    for (long t = 0; t < m; ++t) diff(t) = series(t + 1) - series(t);

    DriftTrendFit fit;
    switch (cfg.mode) {
        case TrendMode::none:
            break;
        case TrendMode::drift:
            fit.drift = diff.mean();
            break;
        case TrendMode::drift_and_trend: {
            // Regressors 1 and t with t = 1..m: sum t = m(m+1)/2, sum t^2 = m(m+1)(2m+1)/6.
            const double st = 0.5 * double(m) * double(m + 1);
            const double stt = double(m) * double(m + 1) * double(2 * m + 1) / 6.0;
            double sy = diff.sum(), sty = 0.0;
            for (long t = 0; t < m; ++t) sty += double(t + 1) * diff(t);
            const double det = double(m) * stt - st * st;
            fit.trend = (double(m) * sty - st * sy) / det;
            fit.drift = (sy - fit.trend * st) / double(m);
            break;
        }
    }
    fit.shocks.resize(m);
    for (long t = 0; t < m; ++t)
        fit.shocks(t) = diff(t) - fit.drift - fit.trend * double(t + 1);
    return fit;
}

// max(e, 0) / min(e, 0) elementwise; positive + negative == shocks.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> split_shocks(const Eigen::VectorXd& shocks) {
    Eigen::VectorXd pos = shocks.cwiseMax(0.0);
    Eigen::VectorXd neg = shocks.cwiseMin(0.0);
    return {pos, neg};
}

struct ComponentSeries {
    Eigen::VectorXd positive;   // length T-1, cumulative positive component
    Eigen::VectorXd negative;   // length T-1, cumulative negative component
    double drift = 0.0;
    double trend = 0.0;
    double initial_value = 0.0;
};

// Assemble the cumulative components from an already-estimated drift/trend
// and split shocks. Each side carries half of the deterministic part
// (a*t + b*t(t+1)/2 + x0), so positive[t] + negative[t] recovers the level
// path relative to the configured starting value.
inline ComponentSeries compose_partial_sums(double drift, double trend, double initial_value,
                                            const Eigen::VectorXd& positive_shocks,
                                            const Eigen::VectorXd& negative_shocks) {
    const long m = positive_shocks.size();
    ComponentSeries cs;
    cs.drift = drift;
    cs.trend = trend;
    cs.initial_value = initial_value;
    cs.positive.resize(m);
    cs.negative.resize(m);
    double cpos = 0.0, cneg = 0.0;
    for (long t = 0; t < m; ++t) {
        cpos += positive_shocks(t);
        cneg += negative_shocks(t);
        const double tt = double(t + 1);
        const double det_half = 0.5 * (drift * tt + trend * tt * (tt + 1.0) / 2.0 + initial_value);
        cs.positive(t) = det_half + cpos;
        cs.negative(t) = det_half + cneg;
    }
    return cs;
}

// Full decomposition of a level series: difference, strip deterministic
// terms, split the shocks by sign, cumulate each side.
inline ComponentSeries build_partial_sums(const Eigen::VectorXd& series, const TrendConfig& cfg) {
    DriftTrendFit fit = fit_drift_trend(series, cfg);
    auto [pos, neg] = split_shocks(fit.shocks);
    return compose_partial_sums(fit.drift, fit.trend, cfg.initial_value, pos, neg);
}

} // namespace dyncause
