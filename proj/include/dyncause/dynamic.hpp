#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dyncause/bootstrap.hpp"
#include "dyncause/causality.hpp"
#include "dyncause/errors.hpp"
#include "dyncause/panel.hpp"
#include "dyncause/var.hpp"

namespace dyncause {

enum class WindowScheme { rolling, recursive };

// Smallest admissible subsample: ceil(T * (0.01 + 1.8 / sqrt(T))). The tiny
// epsilon keeps products that are exact integers in real arithmetic from
// being bumped up by floating-point representation (T = 100 gives 19, not 20).
inline int min_window_size(long T) {
    if (T < 10) throw InsufficientObservations("minimum window rule", T, 10);
    const double v = double(T) * (0.01 + 1.8 / std::sqrt(double(T)));
    return static_cast<int>(std::ceil(v - 1e-9));
}

struct WindowSchedule {
    WindowScheme scheme = WindowScheme::rolling;
    int window = 0;                             // S
    std::vector<std::pair<long, long>> spans;   // 1-based inclusive [start, end]
};

// All windows of a T-long sample. Rolling keeps the length fixed at S and
// slides the start; recursive anchors the start at 1 and grows the end.
// Both yield T - S + 1 windows, indexed by their end point.
inline WindowSchedule build_schedule(long T, WindowScheme scheme,
                                     std::optional<int> window_override = std::nullopt) {
    WindowSchedule sched;
    sched.scheme = scheme;
    sched.window = window_override ? *window_override : min_window_size(T);
    if (sched.window < 2) throw Error("window schedule: window must be >= 2");
    if (sched.window > T) throw WindowExceedsSample(sched.window, T);
    for (long end = sched.window; end <= T; ++end) {
        const long start = scheme == WindowScheme::rolling ? end - sched.window + 1 : 1;
        sched.spans.emplace_back(start, end);
    }
    return sched;
}

// Time-varying profile value: observed statistic over its bootstrap critical
// value. Above 1 means rejection at that level. A zero statistic profiles
// to zero regardless of the critical value (degenerate windows can print a
// zero critical value too); a positive statistic against a non-positive
// critical value has no meaningful ratio.
inline double tvpcv(double wald, double cv) {
    if (wald == 0.0) return 0.0;
    if (!(cv > 0.0)) throw NonPositiveCriticalValue(cv);
    return wald / cv;
}

enum class LagPolicy { fixed, per_window };

struct DynamicSettings {
    int p_max = 4;
    int d = 1;
    bool include_intercept = true;
    LagPolicy lag_policy = LagPolicy::per_window;
    std::optional<int> fixed_p;  // used when lag_policy == fixed
};

struct WindowRecord {
    long ssp_index = 0;  // 1-based window counter (indexed by end point)
    long start = 0, end = 0;
    std::string start_date, end_date;
    int p_star = 0;
    bool pmax_capped = false;
    double wald = std::numeric_limits<double>::quiet_NaN();
    int df = 0;
    double asymptotic_pvalue = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> critical_values;  // one per significance level
    std::vector<double> ratios;           // tvpcv per significance level
    long bootstrap_failures = 0;
    bool ok = false;
    std::string status;  // "ok", "ok capped_pmax=K", or "skipped: reason"
};

struct TvpcvSeries {
    std::vector<double> significance_levels;
    WindowSchedule schedule;
    std::vector<WindowRecord> records;
};

namespace detail {

// Largest p a sample of length L supports with d augmentation lags. The
// estimation needs a full-rank residual covariance, which takes n more
// usable observations than regressor columns: L - (p+d) >= 1 + n(p+d) + n.
// The lag search needs the same headroom for its deepest candidate on the
// alignment sample. Both reduce to p <= (L - n - 1) / (n + 1) - d.
inline int max_supported_p(long L, int d, long n) {
    return static_cast<int>((L - n - 1) / (n + 1) - d);
}

} // namespace detail

// One full causality test (lag choice, Wald, bootstrap critical values) on
// one window's panel. Shared by the dynamic sweep and the static runner.
inline WindowRecord test_window(const Panel& window, const CausalityHypothesis& hyp,
                                const DynamicSettings& settings, const BootstrapConfig& boot) {
    WindowRecord rec;
    const long L = window.rows(), n = window.cols();
    rec.start_date = window.dates.front();
    rec.end_date = window.dates.back();

    int p_max = settings.p_max;
    const int cap = detail::max_supported_p(L, settings.d, n);
    if (cap < 1) {
        rec.status = "skipped: sample of " + std::to_string(L) +
                     " cannot support one testable lag";
        return rec;
    }
    if (p_max > cap) {
        p_max = cap;
        rec.pmax_capped = true;
    }

    try {
        if (settings.lag_policy == LagPolicy::fixed && settings.fixed_p) {
            rec.p_star = std::min(*settings.fixed_p, cap);
            rec.pmax_capped = rec.p_star < *settings.fixed_p;
        } else {
            rec.p_star = select_lag(window.values, p_max, settings.include_intercept).p_star;
        }
        VarSpec spec{rec.p_star, settings.d, settings.include_intercept};
        VarFit fit = estimate_var(window.values, spec, -1);
        const Eigen::MatrixXd C = build_restriction(spec, n, hyp);
        WaldOutcome wald = wald_statistic(fit, C);
        rec.wald = wald.statistic;
        rec.df = wald.df;
        rec.asymptotic_pvalue = wald.asymptotic_pvalue;

        BootstrapDistribution dist = run_bootstrap(window.values, spec, hyp, boot);
        rec.bootstrap_failures = dist.failures;
        for (double a : boot.significance_levels) {
            const double cv = dist.critical_values.at(a);
            rec.critical_values.push_back(cv);
            rec.ratios.push_back(tvpcv(rec.wald, cv));
        }
        rec.ok = true;
        rec.status = rec.pmax_capped ? "ok capped_pmax=" + std::to_string(p_max) : "ok";
    } catch (const Error& e) {
        rec.ok = false;
        rec.status = std::string("skipped: ") + e.what();
        rec.critical_values.assign(boot.significance_levels.size(),
                                   std::numeric_limits<double>::quiet_NaN());
        rec.ratios.assign(boot.significance_levels.size(),
                          std::numeric_limits<double>::quiet_NaN());
    }
    return rec;
}

// Sweep the schedule. `window_panel` maps a 1-based inclusive span to the
// panel tested in that window; the plain overload below slices a fixed
// panel, a caller doing per-window decomposition passes its own builder.
// Window w (0-based) gets the seed stream derive_stream(master, w), so a
// one-off run of the same window with that derived seed reproduces the
// record exactly.
inline TvpcvSeries run_dynamic(const std::function<Panel(long, long)>& window_panel,
                               const CausalityHypothesis& hyp, const DynamicSettings& settings,
                               const BootstrapConfig& boot, const WindowSchedule& schedule) {
    TvpcvSeries series;
    series.significance_levels = boot.significance_levels;
    series.schedule = schedule;
    for (std::size_t w = 0; w < schedule.spans.size(); ++w) {
        const auto [start, end] = schedule.spans[w];
        BootstrapConfig wboot = boot;
        wboot.master_seed = derive_stream(boot.master_seed, std::uint64_t(w));
        WindowRecord rec = test_window(window_panel(start, end), hyp, settings, wboot);
        rec.ssp_index = static_cast<long>(w + 1);
        rec.start = start;
        rec.end = end;
        series.records.push_back(std::move(rec));
    }
    return series;
}

inline TvpcvSeries run_dynamic(const Panel& panel, const CausalityHypothesis& hyp,
                               const DynamicSettings& settings, const BootstrapConfig& boot,
                               const WindowSchedule& schedule) {
    if (!schedule.spans.empty() && schedule.spans.back().second > panel.rows())
        throw WindowExceedsSample(schedule.spans.back().second, panel.rows());
    return run_dynamic(
        [&panel](long start, long end) { return panel.slice_rows(start, end); }, hyp, settings,
        boot, schedule);
}

} // namespace dyncause
