#include "sabc/cli.hpp"

#include "sabc/io.hpp"
#include "sabc/run_config.hpp"
#include "sabc/sabc.hpp"

#include "CLI11.hpp"

#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace sabc {

namespace {

void setup_logging()
{
    auto logger = spdlog::get("sabc");
    if (!logger) logger = spdlog::stderr_color_mt("sabc");
    spdlog::set_default_logger(logger);
    const char* env = std::getenv("SABC_LOG");
    const std::string level = env ? env : "info";
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to off; only accept that when asked for
    if (parsed == spdlog::level::off && level != "off") {
        spdlog::set_level(spdlog::level::info);
        spdlog::warn("SABC_LOG='{}' not recognised, using info", level);
    } else {
        spdlog::set_level(parsed);
    }
}

int cmd_generate(const std::string& name, double noise, std::uint64_t seed, const std::string& out)
{
    const Dataset data = generate_benchmark(name, noise, seed);
    write_dataset(data, out);
    std::cout << "wrote " << data.size() << " samples to " << (fs::path(out) / "data.csv").string() << "\n";
    return exit_ok;
}

int cmd_discover(const std::string& config_path, const std::string& preset, std::optional<std::uint64_t> seed,
                 const std::string& out_override, int threads, bool dry_run)
{
    RunConfigFile cfg = preset.empty() ? load_run_config(config_path)
                                       : parse_run_config(preset_config(preset), fs::current_path());
    if (seed) {
        cfg.sabc.seed = *seed;
        if (!cfg.dataset.path) cfg.dataset.seed = *seed;
    }
    if (!out_override.empty()) cfg.output = out_override;
    if (threads > 0) omp_set_num_threads(threads);

    const Dataset data = resolve_dataset(cfg);
    if (dry_run) {
        std::cout << "dictionary " << cfg.dictionary_name << " (theta dimension " << cfg.dictionary.size() << ")\n";
        for (std::size_t i = 0; i < cfg.dictionary.size(); ++i) std::cout << "  " << i << " " << cfg.dictionary[i].label() << "\n";
        std::cout << "dataset " << data.size() << " samples, dt " << format_double(data.dt()) << ", rounds "
                  << cfg.sabc.rounds.size() << ", substeps " << cfg.sabc.sim.substeps << "\n";
        return exit_ok;
    }

    std::optional<TruthModel> truth;
    if (cfg.truth) truth = resolve_truth(cfg.dictionary, *cfg.truth);

    std::error_code ec;
    fs::create_directories(cfg.output, ec);
    if (ec) throw InputError("cannot create output directory " + cfg.output.string() + ": " + ec.message());

    const RunReport report = run(data, cfg.dictionary, cfg.sabc, truth);
    write_text(cfg.output / "report.json", report_json(report, cfg.dictionary, cfg.sabc));
    write_text(cfg.output / "inclusion.csv", inclusion_csv(cfg.dictionary, report.inclusion_prob));
    write_text(cfg.output / "trace.csv", trace_csv(report.populations));
    write_text(cfg.output / "best_model.txt", format_model(cfg.dictionary, report.best.theta) + "\n");
    write_text(cfg.output / "prediction.csv", prediction_csv(data, cfg.dictionary, report.best.theta, cfg.sabc.sim));

    std::cout << format_model(cfg.dictionary, report.best.theta) << "\n";
    std::cout << "loss " << format_double(report.best.loss.total) << " after " << report.populations.size()
              << " populations\n";
    if (report.delta1) std::cout << "delta1 " << format_double(*report.delta1) << "\n";
    if (report.delta2) std::cout << "delta2 " << format_double(*report.delta2) << "\n";
    spdlog::info("wall time {:.1f} s, outputs in {}", report.wallclock, cfg.output.string());
    return exit_ok;
}

int cmd_evaluate(const std::string& report_path, const std::string& truth_path)
{
    const StoredReport report = read_report(report_path);
    const Dictionary dict = Dictionary::from_labels(report.terms);
    const TruthModel truth = resolve_truth(dict, read_truth(truth_path));
    std::cout << evaluation_json(report, dict, truth);
    return exit_ok;
}

}  // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"Sparse ABC discovery of governing equations from acceleration data", "sabc"};
    app.require_subcommand(1);

    std::string gen_name, gen_out = ".";
    double gen_noise = 0.02;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("generate", "Write a benchmark dataset (data.csv + data.meta.json)");
    gen->add_option("name", gen_name, "pendulum, linear, duffing or viscous")->required();
    gen->add_option("--noise", gen_noise, "Noise level as a fraction of the signal std")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Noise seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory")->capture_default_str();

    std::string config_path, preset, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool dry_run = false;
    auto* disc = app.add_subcommand("discover", "Run the sampler and write reports");
    auto* cfg_opt = disc->add_option("--config", config_path, "Run configuration (JSON)");
    auto* preset_opt = disc->add_option("--preset", preset, "Use a shipped preset instead of a file");
    cfg_opt->excludes(preset_opt);
    disc->add_option("--seed", seed, "Override the sampler (and generated dataset) seed");
    disc->add_option("--out", out_dir, "Override the output directory");
    disc->add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    disc->add_flag("--dry-run", dry_run, "Validate the configuration and print the dictionary");

    std::string report_path, truth_path;
    auto* eval = app.add_subcommand("evaluate", "Recompute metrics of a stored report against a truth model");
    eval->add_option("--report", report_path, "report.json")->required();
    eval->add_option("--truth", truth_path, "JSON term -> coefficient map (or a data.meta.json)")->required();

    auto* list = app.add_subcommand("presets", "List shipped presets, or print one");
    std::string show;
    list->add_option("name", show, "Preset to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_input;
    }

    setup_logging();
    try {
        if (*gen) return cmd_generate(gen_name, gen_noise, gen_seed, gen_out);
        if (*disc) {
            if (config_path.empty() && preset.empty()) throw InputError("discover needs --config or --preset");
            return cmd_discover(config_path, preset, seed, out_dir, threads, dry_run);
        }
        if (*eval) return cmd_evaluate(report_path, truth_path);
        if (*list) {
            if (!show.empty()) std::cout << preset_config(show);
            else for (const auto& n : preset_names()) std::cout << n << "\n";
            return exit_ok;
        }
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return exit_input;
    } catch (const SamplerError& e) {
        spdlog::error("sampler failed: {}", e.what());
        return exit_sampler;
    } catch (const FitError& e) {
        spdlog::error("mixture fit failed: {}", e.what());
        return exit_sampler;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_failure;
    }
    return exit_failure;
}

}  // namespace sabc
