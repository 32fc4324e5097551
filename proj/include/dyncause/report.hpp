#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dyncause/bootstrap.hpp"
#include "dyncause/causality.hpp"
#include "dyncause/csv.hpp"
#include "dyncause/diagnostics.hpp"
#include "dyncause/dynamic.hpp"
#include "dyncause/errors.hpp"
#include "dyncause/panel.hpp"
#include "dyncause/transform.hpp"
#include "dyncause/var.hpp"

namespace dyncause {

// Whether components are built once on the full sample (so every window
// sees the same transformed series) or rebuilt inside each window.
enum class DecompositionTiming { full, per_window };

struct RunConfig {
    std::string input_path;
    std::string cause;   // column name of the hypothesized cause
    std::string effect;  // column name of the hypothesized effect
    ComponentPair components = ComponentPair::raw;
    TrendMode trend = TrendMode::drift_and_trend;
    WindowScheme scheme = WindowScheme::rolling;
    int p_max = 4;
    int d = 1;
    long replications = 10000;
    std::vector<double> significance_levels{0.05, 0.10};
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    bool apply_log = true;
    LagPolicy lag_policy = LagPolicy::per_window;
    DecompositionTiming decompose = DecompositionTiming::full;
    std::optional<int> window_override;
    unsigned threads = 0;
};

namespace detail {

template <typename... Args>
std::string strf(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return std::string(buf);
}

inline const char* pair_name(ComponentPair p) {
    switch (p) {
        case ComponentPair::raw: return "raw";
        case ComponentPair::pos_pos: return "pos-pos";
        case ComponentPair::neg_neg: return "neg-neg";
        case ComponentPair::pos_neg: return "pos-neg";
        case ComponentPair::neg_pos: return "neg-pos";
    }
    return "?";
}

inline const char* trend_name(TrendMode m) {
    switch (m) {
        case TrendMode::none: return "none";
        case TrendMode::drift: return "drift";
        case TrendMode::drift_and_trend: return "drift-trend";
    }
    return "?";
}

// Column suffix for a significance level: 0.05 -> "05", 0.10 -> "10",
// non-round levels spell the percentage with 'p' for the decimal point.
inline std::string level_suffix(double a) {
    const double v = a * 100.0;
    const long r = std::lround(v);
    if (std::abs(v - double(r)) < 1e-9 && r < 100) return strf("%02ld", r);
    std::string s = strf("%g", v);
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

} // namespace detail

// The bivariate system a hypothesis is tested on: effect series first
// (equation 0), cause series second. For component pairs the first sign
// names the cause side, e.g. pos-neg tests "positive cause shocks do not
// cause the negative effect component".
struct PreparedSystem {
    Panel panel;
    CausalityHypothesis hypothesis;
};

inline PreparedSystem prepare_system(const Panel& base, const std::string& cause,
                                     const std::string& effect, ComponentPair pair,
                                     TrendMode trend) {
    const long ci = base.column_index(cause);
    const long ei = base.column_index(effect);
    if (ci == ei) throw Error("cause and effect must be different columns");

    PreparedSystem sys;
    sys.hypothesis.cause = 1;
    sys.hypothesis.effect = 0;
    sys.hypothesis.components = pair;
    Panel two = base.select_columns({ei, ci});
    if (pair == ComponentPair::raw) {
        sys.panel = std::move(two);
        return sys;
    }

    const bool cause_pos = pair == ComponentPair::pos_pos || pair == ComponentPair::pos_neg;
    const bool effect_pos = pair == ComponentPair::pos_pos || pair == ComponentPair::neg_pos;
    // Anchor each side at its own first observation so the two components
    // add back to the original series, not to a zero-based copy of it.
    TrendConfig tc;
    tc.mode = trend;
    tc.initial_value = two.values(0, 0);
    ComponentSeries effect_cs = build_partial_sums(two.values.col(0), tc);
    tc.initial_value = two.values(0, 1);
    ComponentSeries cause_cs = build_partial_sums(two.values.col(1), tc);

    const long m = effect_cs.positive.size();
    sys.panel.dates.assign(two.dates.begin() + 1, two.dates.end());
    sys.panel.names = {two.names[0] + (effect_pos ? "_pos" : "_neg"),
                       two.names[1] + (cause_pos ? "_pos" : "_neg")};
    sys.panel.values.resize(m, 2);
    sys.panel.values.col(0) = effect_pos ? effect_cs.positive : effect_cs.negative;
    sys.panel.values.col(1) = cause_pos ? cause_cs.positive : cause_cs.negative;
    return sys;
}

// Full-sample causality test: lag choice, Wald statistic, asymptotic and
// bootstrap assessments. The same routine a dynamic sweep applies per
// window, so a static run with a window's derived seed reproduces the
// window's record exactly.
inline WindowRecord static_test(const Panel& panel, const CausalityHypothesis& hyp,
                                const DynamicSettings& settings, const BootstrapConfig& boot) {
    WindowRecord rec = test_window(panel, hyp, settings, boot);
    rec.ssp_index = 1;
    rec.start = 1;
    rec.end = panel.rows();
    return rec;
}

struct DiagnosticsRow {
    std::string model;  // "raw", "pos_pos", "neg_neg"
    int p_star = 0;
    std::optional<DiagnosticsReport> report;
    std::string note;  // set when the row could not be computed
};

// Residual diagnostics for the level system and both same-sign component
// systems, each on its own selected (and then augmented) VAR fit.
inline std::vector<DiagnosticsRow> diagnostics_table(const Panel& base, const std::string& cause,
                                                     const std::string& effect, TrendMode trend,
                                                     int p_max, int d, bool intercept = true) {
    std::vector<DiagnosticsRow> rows;
    const std::pair<const char*, ComponentPair> systems[] = {
        {"raw", ComponentPair::raw},
        {"pos_pos", ComponentPair::pos_pos},
        {"neg_neg", ComponentPair::neg_neg},
    };
    for (auto [name, pair] : systems) {
        DiagnosticsRow row;
        row.model = name;
        try {
            PreparedSystem sys = prepare_system(base, cause, effect, pair, trend);
            const long L = sys.panel.rows(), n = sys.panel.cols();
            const int cap = detail::max_supported_p(L, d, n);
            if (cap < 1) throw InsufficientObservations("diagnostics", L, (n + 1) * (1 + d) + 2);
            row.p_star = select_lag(sys.panel.values, std::min(p_max, cap), intercept).p_star;
            VarSpec spec{row.p_star, d, intercept};
            VarFit fit = estimate_var(sys.panel.values, spec, -1);
            row.report = diagnose(fit);
        } catch (const Error& e) {
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct RunResult {
    RunConfig config;
    PreparedSystem system;
    long raw_T = 0;
    TvpcvSeries series;
    std::vector<DiagnosticsRow> diagnostics;
    std::filesystem::path results_path, diagnostics_path, plot_path, summary_path;
};

namespace detail {

// Ratio cell recomputed from the printed statistic and critical value, so
// the emitted file is internally consistent at its own precision. Falls
// back to the exact ratio in the denormal corner where the critical value
// prints as zero but the statistic does not.
inline std::string printed_ratio(double wald, double cv) {
    const std::string ws = format_number(wald), cs = format_number(cv);
    if (ws.empty() || cs.empty()) return "";
    const double wp = parse_number(ws), cp = parse_number(cs);
    if (wp > 0.0 && !(cp > 0.0)) return format_number(tvpcv(wald, cv));
    return format_number(tvpcv(wp, cp));
}

inline bool rejects(const WindowRecord& rec, std::size_t level_idx) {
    return rec.ok && rec.wald > rec.critical_values[level_idx];
}

} // namespace detail

inline void write_dynamic_csv(const std::filesystem::path& path, const TvpcvSeries& series) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "ssp_index,start_date,end_date,p_star,wald";
    for (double a : series.significance_levels) out << ",cv_" << detail::level_suffix(a);
    for (double a : series.significance_levels) out << ",tvpcv_" << detail::level_suffix(a);
    out << ",p_asymptotic,status\n";
    for (const WindowRecord& rec : series.records) {
        out << rec.ssp_index << ',' << rec.start_date << ',' << rec.end_date << ',';
        if (rec.ok) out << rec.p_star;
        out << ',' << format_number(rec.wald);
        for (double cv : rec.critical_values) out << ',' << format_number(cv);
        for (std::size_t i = 0; i < rec.ratios.size(); ++i)
            out << ','
                << (rec.ok ? detail::printed_ratio(rec.wald, rec.critical_values[i]) : "");
        out << ',' << format_number(rec.asymptotic_pvalue) << ',' << rec.status << '\n';
    }
}

inline void write_diagnostics_csv(const std::filesystem::path& path,
                                  const std::vector<DiagnosticsRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "model,p_star,normality_pvalue,arch_pvalue,autocorrelation_pvalue,advisory\n";
    for (const DiagnosticsRow& row : rows) {
        out << row.model << ',';
        if (row.report) {
            out << row.p_star << ',' << format_number(row.report->normality_pvalue) << ','
                << format_number(row.report->arch_pvalue) << ','
                << format_number(row.report->autocorrelation_pvalue) << ','
                << (row.report->advisory == InferenceAdvisory::use_bootstrap ? "use_bootstrap"
                                                                             : "asymptotic_ok");
        } else {
            out << ",,,,unavailable";
        }
        out << '\n';
    }
}

// Profile plot: one polyline per significance level (windows that produced
// no statistic are left out of the line), plus a dashed reference line at
// ratio 1, the rejection boundary.
inline void write_tvpcv_svg(const std::filesystem::path& path, const TvpcvSeries& series) {
    const double W = 900, H = 420, ml = 64, mr = 24, mt = 22, mb = 46;
    const long count = static_cast<long>(series.records.size());
    double ymax = 1.25;
    for (const WindowRecord& rec : series.records)
        for (double r : rec.ratios)
            if (std::isfinite(r)) ymax = std::max(ymax, r * 1.05);

    auto xs = [&](double i) {
        return count > 1 ? ml + (i - 1.0) * (W - ml - mr) / double(count - 1) : ml;
    };
    auto ys = [&](double v) { return H - mb - v * (H - mt - mb) / ymax; };

    static const char* colors[] = {"#2563a8", "#c23b22", "#3a7d44", "#8a5fa8", "#b8860b"};
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    // axes
    out << detail::strf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
                        ml, H - mb, W - mr, H - mb);
    out << detail::strf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
                        ml, mt, ml, H - mb);
    const long xstep = std::max<long>(1, count / 10);
    for (long i = 1; i <= count; i += xstep) {
        out << detail::strf("<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\" "
                            "fill=\"#333\">%ld</text>\n",
                            xs(double(i)), H - mb + 16.0, i);
        out << detail::strf(
            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
            xs(double(i)), H - mb, xs(double(i)), H - mb + 4);
    }
    for (int k = 0; k <= 5; ++k) {
        const double v = ymax * k / 5.0;
        out << detail::strf("<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\" "
                            "fill=\"#333\">%.2f</text>\n",
                            ml - 8.0, ys(v) + 4.0, v);
        out << detail::strf(
            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", ml,
            ys(v), W - mr, ys(v));
    }
    out << detail::strf("<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\" "
                        "fill=\"#333\">window (ssp index)</text>\n",
                        (ml + W - mr) / 2.0, H - 8.0);
    out << detail::strf("<text x=\"16\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\" "
                        "fill=\"#333\" transform=\"rotate(-90 16 %.1f)\">statistic / critical "
                        "value</text>\n",
                        (mt + H - mb) / 2.0, (mt + H - mb) / 2.0);

    // rejection boundary
    out << detail::strf("<line id=\"refline\" x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                        "stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n",
                        ml, ys(1.0), W - mr, ys(1.0));

    for (std::size_t li = 0; li < series.significance_levels.size(); ++li) {
        const char* color = colors[li % 5];
        std::ostringstream pts;
        for (const WindowRecord& rec : series.records)
            if (rec.ok && li < rec.ratios.size() && std::isfinite(rec.ratios[li]))
                pts << detail::strf("%.2f,%.2f ", xs(double(rec.ssp_index)),
                                    ys(std::min(rec.ratios[li], ymax)));
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\""
            << pts.str() << "\"/>\n";
        out << detail::strf("<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\">level "
                            "%g</text>\n",
                            W - mr - 110.0, mt + 16.0 + 16.0 * double(li), color,
                            series.significance_levels[li]);
    }
    out << "</svg>\n";
}

inline void write_summary(const std::filesystem::path& path, const RunResult& res) {
    const RunConfig& cfg = res.config;
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "time-varying causality profile\n";
    out << "==============================\n";
    out << "input: " << cfg.input_path << "\n";
    out << "hypothesis: '" << cfg.cause << "' does not cause '" << cfg.effect << "'\n";
    out << "components: " << detail::pair_name(cfg.components)
        << "  log: " << (cfg.apply_log ? "on" : "off")
        << "  trend removal: " << detail::trend_name(cfg.trend) << "\n";
    out << "sample: " << res.raw_T << " raw rows; tested system has " << res.system.panel.rows()
        << " rows (" << res.system.panel.dates.front() << " .. "
        << res.system.panel.dates.back() << ")\n";
    out << "scheme: " << (cfg.scheme == WindowScheme::rolling ? "rolling" : "recursive")
        << ", minimum window " << res.series.schedule.window << ", "
        << res.series.records.size() << " windows; lag policy "
        << (cfg.lag_policy == LagPolicy::per_window ? "per-window" : "fixed") << " (p_max "
        << cfg.p_max << ", d " << cfg.d << ")\n";
    out << "bootstrap: " << cfg.replications << " replications, seed " << cfg.seed
        << ", levels";
    for (double a : res.series.significance_levels) out << detail::strf(" %g", a);
    out << "\n\n";

    out << "full-sample diagnostics (p-values)\n";
    out << "  model     p   normality  arch      autocorr  advisory\n";
    for (const DiagnosticsRow& row : res.diagnostics) {
        if (row.report)
            out << detail::strf("  %-8s %2d   %-9s  %-8s  %-8s  %s\n", row.model.c_str(),
                                row.p_star, format_number(row.report->normality_pvalue, 4).c_str(),
                                format_number(row.report->arch_pvalue, 4).c_str(),
                                format_number(row.report->autocorrelation_pvalue, 4).c_str(),
                                row.report->advisory == InferenceAdvisory::use_bootstrap
                                    ? "use_bootstrap"
                                    : "asymptotic_ok");
        else
            out << detail::strf("  %-8s  -   unavailable (%s)\n", row.model.c_str(),
                                row.note.c_str());
    }
    out << "\nwindows\n";
    out << "  idx  span                      p  wald        ";
    for (double a : res.series.significance_levels)
        out << detail::strf("cv%-9s", detail::level_suffix(a).c_str());
    for (double a : res.series.significance_levels)
        out << detail::strf("ratio%-6s", detail::level_suffix(a).c_str());
    out << "verdict\n";
    for (const WindowRecord& rec : res.series.records) {
        const std::string span = rec.start_date + " .. " + rec.end_date;
        if (!rec.ok) {
            out << detail::strf("  %3ld  %-24s  -  %s\n", rec.ssp_index, span.c_str(),
                                rec.status.c_str());
            continue;
        }
        out << detail::strf("  %3ld  %-24s %2d  %-10s  ", rec.ssp_index, span.c_str(), rec.p_star,
                            format_number(rec.wald, 3).c_str());
        for (double cv : rec.critical_values)
            out << detail::strf("%-11s", format_number(cv, 3).c_str());
        for (double r : rec.ratios) out << detail::strf("%-11s", format_number(r, 3).c_str());
        std::string verdict;
        for (std::size_t i = 0; i < res.series.significance_levels.size(); ++i)
            if (detail::rejects(rec, i)) {
                if (!verdict.empty()) verdict += ",";
                verdict += detail::strf("%g", res.series.significance_levels[i]);
            }
        out << (verdict.empty() ? "-" : "reject@" + verdict);
        if (rec.pmax_capped) out << "  [" << rec.status << "]";
        out << "\n";
    }
    for (std::size_t i = 0; i < res.series.significance_levels.size(); ++i) {
        out << detail::strf("\nrejections at level %g: ", res.series.significance_levels[i]);
        bool any = false;
        for (const WindowRecord& rec : res.series.records)
            if (detail::rejects(rec, i)) {
                out << (any ? ", " : "") << rec.ssp_index;
                any = true;
            }
        if (!any) out << "none";
    }
    out << "\n";
}

// End-to-end dynamic run: read, transform, sweep, write the four outputs.
inline RunResult run(const RunConfig& cfg) {
    RunResult res;
    res.config = cfg;

    Panel raw = parse_csv(cfg.input_path);
    Panel base = cfg.apply_log ? to_natural_log(raw) : raw;
    res.raw_T = base.rows();
    res.system = prepare_system(base, cfg.cause, cfg.effect, cfg.components, cfg.trend);

    DynamicSettings settings;
    settings.p_max = cfg.p_max;
    settings.d = cfg.d;
    settings.lag_policy = cfg.lag_policy;
    if (cfg.lag_policy == LagPolicy::fixed) {
        const long L = res.system.panel.rows(), n = res.system.panel.cols();
        const int cap = detail::max_supported_p(L, cfg.d, n);
        if (cap < 1) throw InsufficientObservations("full-sample lag choice", L, 10);
        settings.fixed_p =
            select_lag(res.system.panel.values, std::min(cfg.p_max, cap)).p_star;
    }

    BootstrapConfig boot;
    boot.replications = cfg.replications;
    boot.significance_levels = cfg.significance_levels;
    boot.master_seed = cfg.seed;
    boot.threads = cfg.threads;

    const bool window_transform =
        cfg.decompose == DecompositionTiming::per_window && cfg.components != ComponentPair::raw;
    if (window_transform) {
        Panel logged = base;  // components rebuilt inside each raw-sample window
        const std::string cause = cfg.cause, effect = cfg.effect;
        const ComponentPair pair = cfg.components;
        const TrendMode trend = cfg.trend;
        WindowSchedule sched = build_schedule(base.rows(), cfg.scheme, cfg.window_override);
        res.series = run_dynamic(
            [logged, cause, effect, pair, trend](long s, long e) {
                return prepare_system(logged.slice_rows(s, e), cause, effect, pair, trend).panel;
            },
            res.system.hypothesis, settings, boot, sched);
    } else {
        WindowSchedule sched =
            build_schedule(res.system.panel.rows(), cfg.scheme, cfg.window_override);
        res.series = run_dynamic(res.system.panel, res.system.hypothesis, settings, boot, sched);
    }

    res.diagnostics =
        diagnostics_table(base, cfg.cause, cfg.effect, cfg.trend, cfg.p_max, cfg.d);

    std::filesystem::path dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
    std::filesystem::create_directories(dir);
    res.results_path = dir / "dynamic_results.csv";
    res.diagnostics_path = dir / "diagnostics.csv";
    res.plot_path = dir / "tvpcv.svg";
    res.summary_path = dir / "summary.txt";
    write_dynamic_csv(res.results_path, res.series);
    write_diagnostics_csv(res.diagnostics_path, res.diagnostics);
    write_tvpcv_svg(res.plot_path, res.series);
    write_summary(res.summary_path, res);
    return res;
}

} // namespace dyncause
