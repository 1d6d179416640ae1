#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "modelock/error.hpp"
#include "modelock/io.hpp"

namespace modelock::cli {

namespace {

struct Overrides {
    std::optional<int> threads;
    std::optional<unsigned long long> seed;
};

int run_one(Config cfg, const std::filesystem::path& out_dir, const Overrides& o, std::ostream& out) {
    if (o.threads) cfg.set("threads", std::to_string(*o.threads));
    if (o.seed) cfg.set("seed", std::to_string(*o.seed));
    const Settings settings(std::move(cfg));
    const auto report = run(settings, out_dir, out);
    out << "wrote " << report.outputs.size() << " files and manifest.txt to " << out_dir.string() << " in "
        << format_double(report.seconds) << " s\n";
    return report.all_pass() ? exit_ok : exit_check;
}

int guarded(std::ostream& err, auto&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const SchemaError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

void print_maps(std::ostream& out) {
    for (const MapDef* m : registered_maps()) {
        out << "map: " << m->id << '\n' << "description: " << m->description << '\n'
            << "smoothness: " << (m->smoothness == Smoothness::smooth ? "smooth" : "piecewise-linear") << '\n';
        for (const auto& p : m->schema) out << "param." << p.name << " = " << format_double(p.default_value) << '\n';
        out << '\n';
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"modelock: mode-locked periodic orbits and closed invariant curves of 3D maps", "modelock"};
    app.set_version_flag("--version", MODELOCK_VERSION);
    app.fallthrough();
    std::string config_path, preset_name, out_dir = "out";
    Overrides o;
    int threads = 0;
    unsigned long long seed = 0;
    app.add_option("--config", config_path, "experiment config file (key = value)");
    app.add_option("--preset", preset_name, "run a named preset");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    auto* t_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    auto* s_opt = app.add_option("--seed", seed, "RNG seed for random starts");
    auto* reproduce = app.add_subcommand("reproduce", "run a preset and evaluate its checks");
    std::string reproduce_name;
    reproduce->add_option("preset", reproduce_name, "preset name")->required();
    auto* list = app.add_subcommand("list-presets", "print the preset catalog");
    auto* maps = app.add_subcommand("list-maps", "print map schemas and defaults");
    app.require_subcommand(0, 1);

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << MODELOCK_VERSION << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
        return exit_config;
    }
    if (t_opt->count()) o.threads = threads;
    if (s_opt->count()) o.seed = seed;

    if (list->parsed()) {
        for (const auto& p : presets()) out << p.name << "  " << p.description << '\n';
        return exit_ok;
    }
    if (maps->parsed()) {
        print_maps(out);
        return exit_ok;
    }
    if (reproduce->parsed()) {
        if (!preset_name.empty() && preset_name != reproduce_name) {
            err << "usage error: --preset and reproduce name different presets\n";
            return exit_config;
        }
        preset_name = reproduce_name;
    }
    if (!config_path.empty() && !preset_name.empty()) {
        err << "usage error: give either --config or a preset, not both\n";
        return exit_config;
    }
    if (!config_path.empty())
        return guarded(err, [&] { return run_one(Config::load(config_path), out_dir, o, out); });
    if (preset_name.empty()) {
        err << "usage error: nothing to do (use --config, --preset, reproduce, list-presets or list-maps)\n";
        return exit_config;
    }
    const Preset* preset = find_preset(preset_name);
    if (!preset) {
        err << "usage error: unknown preset '" << preset_name << "' (see list-presets)\n";
        return exit_config;
    }
    int worst = exit_ok;
    for (const auto& step : preset->steps) {
        std::filesystem::path dir = std::filesystem::path(out_dir) / std::string(preset->name);
        if (!step.name.empty()) dir /= std::string(step.name);
        out << "== " << preset->name << (step.name.empty() ? "" : "/") << step.name << '\n';
        const std::string origin = "preset " + std::string(preset->name);
        const int code = guarded(err, [&] { return run_one(Config::parse(step.config, origin), dir, o, out); });
        if (code != exit_ok && code != exit_check) return code;
        worst = std::max(worst, code);
    }
    out << preset->name << ": " << (worst == exit_ok ? "PASS" : "FAIL") << '\n';
    return worst;
}

}  // namespace modelock::cli
