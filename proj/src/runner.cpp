#include "dfano/runner.hpp"

#include "dfano/continuum_oracle.hpp"
#include "dfano/errors.hpp"
#include "dfano/experiments.hpp"
#include "dfano/spectral_engine.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dfano
{
namespace
{
std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sci(double v)
{
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

struct OracleOutcome
{
    Spectrum spectrum; // on the oracle grid
    std::vector<std::string> notes;
};

OracleOutcome oracle_spectrum(const RunConfig& c, const RunOptions& o)
{
    const OracleSettings s = resolve_oracle_settings(c.atom, c.field, c.oracle);
    const ContinuumGrid grid = build_grid(s.window->lo, s.window->hi, s.n_points, derive_params(c.atom));

    IntegrationOptions io;
    io.checkpoint_interval = *s.checkpoint_interval;
    if (!o.checkpoint_dir.empty()) {
        std::filesystem::create_directories(o.checkpoint_dir);
        io.on_checkpoint = [&](const Checkpoint& cp) {
            std::ostringstream name;
            name << "checkpoint_t" << format_double(cp.t) << ".csv";
            std::ofstream f(std::filesystem::path(o.checkpoint_dir) / name.str());
            write_checkpoint_csv(f, cp, grid);
        };
    }
    const OracleTrajectory traj = integrate(c.atom, c.field, grid, *s.t_final, *s.dt, io);

    OracleOutcome out;
    out.notes.push_back("oracle window = [" + format_double(s.window->lo) + ", " +
                        format_double(s.window->hi) + "], n_points = " + std::to_string(s.n_points));
    out.notes.push_back("oracle dt = " + format_double(*s.dt) + ", t_final = " +
                        format_double(*s.t_final) + ", checkpoint_interval = " +
                        format_double(*s.checkpoint_interval));
    const double t_end = traj.checkpoints.empty() ? 0.0 : traj.checkpoints.back().t;
    out.notes.push_back("oracle stopped at t = " + format_double(t_end) + " after " +
                        std::to_string(traj.steps) + " steps, converged = " +
                        (traj.converged ? "true" : "false"));
    out.notes.push_back("oracle max conservation drift = " + sci(traj.max_conservation_drift) +
                        ", p0 final = " + sci(traj.final_state.p0));
    out.notes.push_back("oracle values linearly interpolated onto the output grid");
    out.spectrum = spectrum_oracle(traj, grid);
    return out;
}

std::vector<std::string> analytic_notes(const RunConfig& c, const std::vector<double>& grid)
{
    const AnalyticDiagnostics d = analytic_diagnostics(c.atom, c.field, grid, c.closed_form);
    std::vector<std::string> notes{
        "analytic max residual = " + sci(d.max_residual) + ", max condition = " + sci(d.max_condition),
        "analytic conjugation mismatch D = " + sci(d.max_conjugation_mismatch) +
            ", H = " + sci(d.max_h_conjugation_mismatch),
        "analytic z* convergence = " + sci(d.z_convergence) + ", total weight = " + sci(d.total_weight),
    };
    for (const auto& w : d.warnings)
        notes.push_back("analytic warning: " + w);
    return notes;
}

std::string sweep_method_tag(const SweepSection& s)
{
    std::string tag = "sweep:";
    for (std::size_t i = 0; i < s.methods.size(); ++i)
        tag += (i ? "+" : "") + to_string(s.methods[i]);
    return tag;
}
} // namespace

RunProduct execute(const RunConfig& config, const RunOptions& options)
{
    RunConfig c = config;
    if (options.mode)
        c.mode = *options.mode;
    if (options.out_path)
        c.output.path = *options.out_path;
    if (options.format)
        c.output.format = *options.format;
    if (c.mode != RunMode::Sweep) {
        c.sweep.reset();
        std::erase_if(c.assumed, [](const std::string& a) { return a.rfind("run.sweep", 0) == 0; });
    } else if (!c.sweep) {
        throw ConfigError("run.sweep: mode sweep needs a sweep section");
    }

    RunProduct p;
    p.meta.config_text = serialize_config(c);
    if (options.timestamp)
        p.meta.timestamp = utc_timestamp();
    for (const auto& a : c.assumed)
        p.meta.notes.push_back("assumed: " + a);

    const std::vector<double> grid = c.grid.points();
    switch (c.mode) {
    case RunMode::Analytic: {
        p.meta.method = "analytic";
        const Spectrum s = spectrum_analytic(c.atom, c.field, grid, c.closed_form);
        for (auto& n : analytic_notes(c, grid))
            p.meta.notes.push_back(std::move(n));
        p.table.columns = {"omega", "w_analytic"};
        for (std::size_t i = 0; i < grid.size(); ++i)
            p.table.rows.push_back({grid[i], s.values[i]});
        break;
    }
    case RunMode::Oracle:
    case RunMode::Both: {
        const bool both = c.mode == RunMode::Both;
        p.meta.method = both ? "both" : "oracle";
        Spectrum a;
        if (both) {
            a = spectrum_analytic(c.atom, c.field, grid, c.closed_form);
            for (auto& n : analytic_notes(c, grid))
                p.meta.notes.push_back(std::move(n));
        }
        OracleOutcome o = oracle_spectrum(c, options);
        for (auto& n : o.notes)
            p.meta.notes.push_back(std::move(n));
        const Spectrum r = resample(o.spectrum, grid);
        p.table.columns = both ? std::vector<std::string>{"omega", "w_analytic", "w_oracle"}
                               : std::vector<std::string>{"omega", "w_oracle"};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (both)
                p.table.rows.push_back({grid[i], a.values[i], r.values[i]});
            else
                p.table.rows.push_back({grid[i], r.values[i]});
        }
        break;
    }
    case RunMode::Sweep: {
        p.meta.method = sweep_method_tag(*c.sweep);
        const SweepSpec spec = make_sweep_spec(c);
        const SweepResult result = run_sweep(spec, options.max_workers);
        p.table.columns = {"param_value", "omega"};
        for (Method m : spec.methods)
            p.table.columns.push_back("w_" + to_string(m));
        const std::size_t m = spec.methods.size();
        for (std::size_t v = 0; v < spec.values.size(); ++v) {
            for (std::size_t k = 0; k < m; ++k) {
                const SweepCell& cell = result.cells[v * m + k];
                if (!cell.spectrum) {
                    ++p.failed_cells;
                    p.meta.notes.push_back("failed cell " + to_string(spec.swept) + " = " +
                                           format_double(cell.value) + " (" + to_string(cell.method) +
                                           "): " + cell.error);
                }
            }
            for (std::size_t i = 0; i < grid.size(); ++i) {
                std::vector<double> row{spec.values[v], grid[i]};
                for (std::size_t k = 0; k < m; ++k) {
                    const SweepCell& cell = result.cells[v * m + k];
                    row.push_back(cell.spectrum ? cell.spectrum->values[i] : std::nan(""));
                }
                p.table.rows.push_back(std::move(row));
            }
        }
        break;
    }
    }
    return p;
}

int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err)
{
    RunProduct p;
    try {
        p = execute(config, options);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }

    const std::string path = options.out_path.value_or(config.output.path);
    const OutputFormat format = options.format.value_or(config.output.format);
    if (path.empty()) {
        write_table(out, format, p.meta, p.table);
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            err << "config error: cannot open output file '" << path << "'\n";
            return kExitConfig;
        }
        write_table(f, format, p.meta, p.table);
    }

    if (p.failed_cells > 0) {
        err << "numerical failure: " << p.failed_cells << " sweep cell(s) failed\n";
        for (const auto& n : p.meta.notes)
            if (n.rfind("failed cell", 0) == 0)
                err << "  " << n << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

} // namespace dfano
