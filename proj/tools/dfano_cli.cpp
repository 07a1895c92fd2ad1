#include "dfano/config.hpp"
#include "dfano/errors.hpp"
#include "dfano/output.hpp"
#include "dfano/presets.hpp"
#include "dfano/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace
{
struct Common
{
    std::string config_path;
    std::string preset;
    std::string out;
    std::string format;
    bool no_timestamp = false;
    bool deterministic = true;
    unsigned workers = 0;
};

void add_common(CLI::App* app, Common& c)
{
    auto* cfg = app->add_option("--config", c.config_path, "YAML run configuration")->check(CLI::ExistingFile);
    auto* pre = app->add_option("--preset", c.preset, "bundled figure preset (see `dfano presets`)");
    cfg->excludes(pre);
    app->add_option("--out", c.out, "output file (default: config output.path, else stdout)");
    app->add_option("--format", c.format, "csv or json-lines")->check(CLI::IsMember({"csv", "json-lines"}));
    app->add_flag("--no-timestamp", c.no_timestamp, "omit the timestamp header line");
    app->add_flag("--seedless-deterministic,!--no-seedless-deterministic", c.deterministic,
                  "the pipeline has no randomness; accepted for scripting symmetry");
    app->add_option("--workers", c.workers, "worker threads for sweeps and spectra (0: all cores)");
}

dfano::RunConfig load(const Common& c)
{
    if (!c.preset.empty())
        return dfano::load_preset(c.preset);
    if (c.config_path.empty())
        throw dfano::ConfigError("give --config <path> or --preset <name>");
    std::ifstream in(c.config_path);
    if (!in)
        throw dfano::ConfigError("cannot read config file '" + c.config_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    return dfano::parse_config(text.str());
}

dfano::RunOptions options(const Common& c, dfano::RunMode mode)
{
    dfano::RunOptions o;
    o.mode = mode;
    if (!c.out.empty())
        o.out_path = c.out;
    if (!c.format.empty())
        o.format = dfano::parse_output_format(c.format);
    o.timestamp = !c.no_timestamp;
    o.max_workers = c.workers;
    return o;
}

int run_with(const Common& c, auto pick_mode, const std::string& checkpoint_dir = {})
{
    dfano::RunConfig config;
    try {
        config = load(c);
    } catch (const dfano::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return dfano::kExitConfig;
    }
    dfano::RunOptions o = options(c, pick_mode(config.mode));
    o.checkpoint_dir = checkpoint_dir;
    return dfano::run(config, o, std::cout, std::cerr);
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Photoelectron spectra of a double-Fano atom in a partially coherent laser field"};
    app.set_version_flag("--version", "dfano " + dfano::tool_version());
    app.require_subcommand(1);

    Common spectrum_opts;
    auto* spectrum = app.add_subcommand("spectrum", "closed-form spectrum (or both paths when the config says mode: both)");
    add_common(spectrum, spectrum_opts);

    Common oracle_opts;
    std::string checkpoint_dir;
    auto* oracle = app.add_subcommand("oracle", "time-domain reference spectrum (or both paths when the config says mode: both)");
    add_common(oracle, oracle_opts);
    oracle->add_option("--checkpoints", checkpoint_dir, "directory for per-checkpoint snapshots");

    Common sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "parameter sweep of the config's sweep section");
    add_common(sweep, sweep_opts);

    std::string show;
    auto* presets = app.add_subcommand("presets", "list bundled presets, or print one");
    presets->add_option("name", show, "preset to print");

    std::string data_path;
    std::string script_out;
    auto* plot = app.add_subcommand("plotscript", "write a gnuplot script for a CSV data file");
    plot->add_option("data", data_path, "CSV written by spectrum/oracle/sweep")->required();
    plot->add_option("--out", script_out, "script path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*spectrum)
            return run_with(spectrum_opts, [](dfano::RunMode m) {
                return m == dfano::RunMode::Both ? m : dfano::RunMode::Analytic;
            });
        if (*oracle)
            return run_with(
                oracle_opts,
                [](dfano::RunMode m) { return m == dfano::RunMode::Both ? m : dfano::RunMode::Oracle; },
                checkpoint_dir);
        if (*sweep)
            return run_with(sweep_opts, [](dfano::RunMode) { return dfano::RunMode::Sweep; });
        if (*presets) {
            if (show.empty()) {
                for (const auto& n : dfano::preset_names())
                    std::cout << n << '\n';
                return dfano::kExitOk;
            }
            const auto text = dfano::preset_text(show);
            if (!text) {
                std::cerr << "config error: unknown preset '" << show << "'\n";
                return dfano::kExitConfig;
            }
            std::cout << *text;
            return dfano::kExitOk;
        }
        if (*plot) {
            const std::string script = dfano::plot_script(data_path);
            if (script_out.empty()) {
                std::cout << script;
            } else {
                std::ofstream f(script_out);
                if (!f) {
                    std::cerr << "config error: cannot write '" << script_out << "'\n";
                    return dfano::kExitConfig;
                }
                f << script;
            }
            return dfano::kExitOk;
        }
    } catch (const dfano::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return dfano::kExitConfig;
    } catch (const dfano::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return dfano::kExitNumerical;
    }
    return dfano::kExitOk;
}
