// Command-line front end: time-varying and full-sample Granger-causality
// tests on dated CSV panels, with optional positive/negative component
// decomposition and bootstrap critical values.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dyncause/dyncause.hpp>

namespace {

using namespace dyncause;

struct CliOptions {
    RunConfig cfg;
    std::string components = "raw";
    std::string trend = "drift-trend";
    std::string scheme = "rolling";
    std::string lag_policy = "per-window";
    std::string decompose = "full";
    std::vector<double> alphas{0.05, 0.10};
    int s_override = 0;
};

void add_common_options(CLI::App* cmd, CliOptions& opt, bool dynamic) {
    cmd->add_option("--input", opt.cfg.input_path, "input CSV (date column first)")
        ->required();
    cmd->add_option("--cause", opt.cfg.cause, "column hypothesized as the cause")->required();
    cmd->add_option("--effect", opt.cfg.effect, "column hypothesized as the effect")->required();
    cmd->add_option("--components", opt.components,
                    "series entering the test: raw|pos|neg|pos-neg|neg-pos "
                    "(first sign = cause side)")
        ->check(CLI::IsMember({"raw", "pos", "neg", "pos-neg", "neg-pos"}));
    cmd->add_option("--trend", opt.trend,
                    "deterministic terms removed before cumulating components")
        ->check(CLI::IsMember({"none", "drift", "drift-trend"}));
    cmd->add_option("--pmax", opt.cfg.p_max, "largest lag order searched")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--d", opt.cfg.d, "extra unrestricted augmentation lags")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--reps", opt.cfg.replications, "bootstrap replications")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", opt.alphas, "significance levels")->delimiter(',');
    cmd->add_option("--seed", opt.cfg.seed, "master seed for the bootstrap streams");
    cmd->add_option("--out", opt.cfg.out_dir, "output directory");
    cmd->add_option("--threads", opt.cfg.threads, "worker threads (0 = all cores)");
    cmd->add_flag("!--no-log", opt.cfg.apply_log, "skip the natural-log transform");
    if (dynamic) {
        cmd->add_option("--scheme", opt.scheme, "window scheme")
            ->check(CLI::IsMember({"rolling", "recursive"}));
        cmd->add_option("--lag-policy", opt.lag_policy,
                        "choose the lag order per window or once on the full sample")
            ->check(CLI::IsMember({"per-window", "fixed"}));
        cmd->add_option("--decompose", opt.decompose,
                        "build components once or inside every window")
            ->check(CLI::IsMember({"full", "per-window"}));
        cmd->add_option("--s-override", opt.s_override,
                        "window size override (default: minimum-window rule)");
    }
    cmd->set_config("--config", "", "flat key=value config file; command-line flags win");
}

RunConfig finalize(CliOptions& opt) {
    static const std::map<std::string, ComponentPair> pairs{
        {"raw", ComponentPair::raw},
        {"pos", ComponentPair::pos_pos},
        {"neg", ComponentPair::neg_neg},
        {"pos-neg", ComponentPair::pos_neg},
        {"neg-pos", ComponentPair::neg_pos}};
    static const std::map<std::string, TrendMode> trends{
        {"none", TrendMode::none},
        {"drift", TrendMode::drift},
        {"drift-trend", TrendMode::drift_and_trend}};
    opt.cfg.components = pairs.at(opt.components);
    opt.cfg.trend = trends.at(opt.trend);
    opt.cfg.scheme = opt.scheme == "recursive" ? WindowScheme::recursive : WindowScheme::rolling;
    opt.cfg.lag_policy =
        opt.lag_policy == "fixed" ? LagPolicy::fixed : LagPolicy::per_window;
    opt.cfg.decompose = opt.decompose == "per-window" ? DecompositionTiming::per_window
                                                      : DecompositionTiming::full;
    std::sort(opt.alphas.begin(), opt.alphas.end());
    opt.alphas.erase(std::unique(opt.alphas.begin(), opt.alphas.end()), opt.alphas.end());
    for (double a : opt.alphas)
        if (!(a > 0.0 && a < 1.0)) throw Error("significance levels must lie in (0, 1)");
    if (opt.alphas.empty()) throw Error("need at least one significance level");
    opt.cfg.significance_levels = opt.alphas;
    if (opt.s_override > 0) opt.cfg.window_override = opt.s_override;
    return opt.cfg;
}

int run_dynamic_command(CliOptions& opt) {
    RunConfig cfg = finalize(opt);
    RunResult res = run(cfg);
    long tested = 0, skipped = 0;
    for (const auto& rec : res.series.records) (rec.ok ? tested : skipped)++;
    std::cout << "windows: " << res.series.records.size() << " (" << tested << " tested, "
              << skipped << " skipped), minimum window " << res.series.schedule.window << "\n";
    for (std::size_t i = 0; i < res.series.significance_levels.size(); ++i) {
        std::cout << "rejections at " << res.series.significance_levels[i] << ":";
        bool any = false;
        for (const auto& rec : res.series.records)
            if (rec.ok && rec.wald > rec.critical_values[i]) {
                std::cout << " " << rec.ssp_index;
                any = true;
            }
        std::cout << (any ? "" : " none") << "\n";
    }
    std::cout << "wrote " << res.results_path.string() << ", " << res.diagnostics_path.string()
              << ", " << res.plot_path.string() << ", " << res.summary_path.string() << "\n";
    return 0;
}

int run_static_command(CliOptions& opt) {
    RunConfig cfg = finalize(opt);
    Panel raw = parse_csv(cfg.input_path);
    Panel base = cfg.apply_log ? to_natural_log(raw) : raw;
    PreparedSystem sys = prepare_system(base, cfg.cause, cfg.effect, cfg.components, cfg.trend);

    DynamicSettings settings;
    settings.p_max = cfg.p_max;
    settings.d = cfg.d;
    BootstrapConfig boot;
    boot.replications = cfg.replications;
    boot.significance_levels = cfg.significance_levels;
    boot.master_seed = cfg.seed;
    boot.threads = cfg.threads;

    WindowRecord rec = static_test(sys.panel, sys.hypothesis, settings, boot);
    if (!rec.ok) throw Error(rec.status);

    std::cout << "hypothesis: '" << cfg.cause << "' does not cause '" << cfg.effect
              << "'  [components: " << opt.components << "]\n";
    std::cout << "sample: " << sys.panel.rows() << " observations (" << sys.panel.dates.front()
              << " .. " << sys.panel.dates.back() << ")\n";
    std::cout << "lag order " << rec.p_star << " (+" << cfg.d << " augmentation), Wald "
              << format_number(rec.wald) << " on " << rec.df << " df, asymptotic p "
              << format_number(rec.asymptotic_pvalue) << "\n";
    for (std::size_t i = 0; i < cfg.significance_levels.size(); ++i)
        std::cout << "level " << cfg.significance_levels[i] << ": bootstrap cv "
                  << format_number(rec.critical_values[i]) << " -> "
                  << (rec.wald > rec.critical_values[i] ? "reject" : "no rejection")
                  << " (ratio " << format_number(rec.ratios[i]) << ")\n";

    std::vector<DiagnosticsRow> diag =
        diagnostics_table(base, cfg.cause, cfg.effect, cfg.trend, cfg.p_max, cfg.d);
    for (const DiagnosticsRow& row : diag) {
        std::cout << "diagnostics[" << row.model << "]: ";
        if (row.report)
            std::cout << "normality p " << format_number(row.report->normality_pvalue, 4)
                      << ", arch p " << format_number(row.report->arch_pvalue, 4)
                      << ", autocorr p "
                      << format_number(row.report->autocorrelation_pvalue, 4) << " -> "
                      << (row.report->advisory == InferenceAdvisory::use_bootstrap
                              ? "use_bootstrap"
                              : "asymptotic_ok")
                      << "\n";
        else
            std::cout << "unavailable (" << row.note << ")\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-varying symmetric and asymmetric causality testing"};
    app.require_subcommand(1);

    CliOptions dyn_opt, stat_opt;
    long t_value = 0;

    CLI::App* cmd_run = app.add_subcommand("run", "windowed causality profile over the sample");
    add_common_options(cmd_run, dyn_opt, true);

    CLI::App* cmd_static = app.add_subcommand("static", "one causality test on the full sample");
    add_common_options(cmd_static, stat_opt, false);

    CLI::App* cmd_ws =
        app.add_subcommand("window-size", "print the minimum admissible window for a sample");
    cmd_ws->add_option("--t", t_value, "sample length")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (cmd_run->parsed()) return run_dynamic_command(dyn_opt);
        if (cmd_static->parsed()) return run_static_command(stat_opt);
        std::cout << dyncause::min_window_size(t_value) << "\n";
        return 0;
    } catch (const dyncause::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
