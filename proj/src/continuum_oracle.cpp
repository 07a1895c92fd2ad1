#include "dfano/continuum_oracle.hpp"

#include "dfano/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dfano
{
double ContinuumGrid::total_coupling() const
{
    double f = 0.0;
    for (std::size_t k = 0; k < size(); ++k)
        f += weights[k] * s_values[k];
    return f;
}

double ContinuumGrid::max_form_factor() const
{
    return s_values.empty() ? 0.0 : *std::max_element(s_values.begin(), s_values.end());
}

ContinuumGrid build_grid(double omega_min, double omega_max, std::size_t n,
                         const DerivedParams& derived)
{
    if (!(omega_max > omega_min) || !std::isfinite(omega_min) || !std::isfinite(omega_max))
        throw ParameterError("continuum window must satisfy omega_min < omega_max");
    if (n < 3)
        throw ParameterError("continuum grid needs at least 3 points");

    ContinuumGrid g;
    g.omega_min = omega_min;
    g.omega_max = omega_max;
    g.points = uniform_grid(omega_min, omega_max, n);
    const double h = (omega_max - omega_min) / static_cast<double>(n - 1);
    g.weights.assign(n, h);
    g.weights.front() = g.weights.back() = h / 2.0;
    g.s_values.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        g.s_values[k] = form_factor(g.points[k], derived);
    return g;
}

Window default_window(const FieldParams& field, const DerivedParams& derived)
{
    const double gamma = derived.gamma_total;
    Window w{field.omega_laser - 12.0 * gamma, field.omega_laser + 12.0 * gamma};
    for (const cplx& pole : {derived.omega_plus, derived.omega_minus}) {
        w.lo = std::min(w.lo, pole.real() - 8.0 * gamma);
        w.hi = std::max(w.hi, pole.real() + 8.0 * gamma);
    }
    return w;
}

double max_stable_step(const ContinuumGrid& grid, const FieldParams& field)
{
    const double width = grid.omega_max - grid.omega_min;
    const double detuning = std::max(std::abs(grid.omega_max - field.omega_laser),
                                     std::abs(grid.omega_min - field.omega_laser));
    const double rate = std::max({detuning, width, field.noise_strength() * grid.total_coupling(),
                                  field.b * std::sqrt(grid.max_form_factor() * width)});
    return 0.1 / rate;
}

double recurrence_time(const ContinuumGrid& grid)
{
    return 2.0 * std::numbers::pi / grid.spacing();
}

OracleState OracleState::initial(std::size_t n)
{
    OracleState s;
    s.d.assign(n, cplx{});
    s.e.assign(n * n, cplx{});
    return s;
}

double OracleState::conservation_error(const ContinuumGrid& grid) const
{
    double continuum = 0.0;
    const std::size_t n = size();
    for (std::size_t k = 0; k < n; ++k)
        continuum += grid.weights[k] * grid.s_values[k] * e[k * n + k].real();
    return p0 + continuum - 1.0;
}

double OracleState::hermiticity_error() const
{
    const std::size_t n = size();
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        err = std::max(err, std::abs(e[i * n + i].imag()));
        for (std::size_t j = i + 1; j < n; ++j)
            err = std::max(err, std::abs(e[i * n + j] - std::conj(e[j * n + i])));
    }
    return err;
}

void OracleState::symmetrize()
{
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        e[i * n + i] = cplx(e[i * n + i].real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (e[i * n + j] + std::conj(e[j * n + i]));
            e[i * n + j] = avg;
            e[j * n + i] = std::conj(avg);
        }
    }
}

namespace
{
// Grid-level constants of the right-hand side.
struct RhsContext
{
    const ContinuumGrid& grid;
    std::vector<double> ws;  // w_k S_k
    double f_total = 0.0;
    double a = 0.0;
    double b = 0.0;
    double omega_laser = 0.0;

    RhsContext(const ContinuumGrid& g, const FieldParams& field)
        : grid(g), ws(g.size())
    {
        for (std::size_t k = 0; k < g.size(); ++k)
            ws[k] = g.weights[k] * g.s_values[k];
        f_total = g.total_coupling();
        a = field.noise_strength();
        b = field.b;
        omega_laser = field.omega_laser;
    }
};

// Scratch space reused across derivative evaluations.
struct Reductions
{
    std::vector<cplx> row;       // Σ_k E_ik ws_k
    std::vector<double> c_re;    // -b Im D_i - (a/2) Re row_i
    std::vector<double> g_im;    //  b Re D_i + (a/2) Im row_i
    std::vector<double> scratch; // one derivative row, interleaved re/im
    cplx s_d;                    // Σ_k ws_k D_k
    double total = 0.0;          // Re Σ_ik ws_i E_ik ws_k
};

void reduce(const RhsContext& ctx, const OracleState& y, Reductions& red)
{
    const std::size_t n = y.size();
    red.row.resize(n);
    red.c_re.resize(n);
    red.g_im.resize(n);
    const double* ws = ctx.ws.data();
    const double* e = reinterpret_cast<const double*>(y.e.data());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double* ei = e + 2 * i * n;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            re += ei[2 * k] * ws[k];
            im += ei[2 * k + 1] * ws[k];
        }
        red.row[i] = cplx(re, im);
    }
    red.s_d = cplx{};
    double total = 0.0;
    const double half_a = 0.5 * ctx.a;
    for (std::size_t i = 0; i < n; ++i) {
        red.s_d += ws[i] * y.d[i];
        total += ws[i] * red.row[i].real();
        red.c_re[i] = -ctx.b * y.d[i].imag() - half_a * red.row[i].real();
        red.g_im[i] = ctx.b * y.d[i].real() + half_a * red.row[i].imag();
    }
    red.total = total;
}

// Evaluates the derivative of `y` and hands it to `sink` as sink.e_row(i, row)
// with row the interleaved dE_i· values, then sink.d(i, dD_i), then
// sink.p0(dP0). Every dE_ij is assembled from i/j-symmetric pieces so that
// dE_ji == conj(dE_ij) holds bit for bit.
template <class Sink>
void evaluate(const RhsContext& ctx, const OracleState& y, Reductions& red, Sink& sink)
{
    reduce(ctx, y, red);
    const std::size_t n = y.size();
    const double a = ctx.a;
    const double b = ctx.b;
    const cplx ib(0.0, b);
    const double p = y.p0;
    const double* w = ctx.grid.points.data();
    const double* c_re = red.c_re.data();
    const double* g_im = red.g_im.data();
    const double* e = reinterpret_cast<const double*>(y.e.data());
    const double source = a * p;

#pragma omp parallel
    {
        std::vector<double> local;
        double* drow = nullptr;
#ifdef _OPENMP
        local.resize(2 * n);
        drow = local.data();
#else
        red.scratch.resize(2 * n);
        drow = red.scratch.data();
#endif
#pragma omp for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            const double* ei = e + 2 * i * n;
            const double wi = w[i];
            const double ci = c_re[i];
            const double gi = g_im[i];
            for (std::size_t j = 0; j < n; ++j) {
                const double dw = wi - w[j];
                drow[2 * j] = (source + (ci + c_re[j])) - dw * ei[2 * j + 1];
                drow[2 * j + 1] = (g_im[j] - gi) + dw * ei[2 * j];
            }
            sink.e_row(i, drow);
        }
    }

    // The sink may alias y, so d and p0 go last: each reads only its own slot.
    const cplx common_d = -ib * p - 0.5 * a * red.s_d;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx rot(-0.5 * a * ctx.f_total, ctx.omega_laser - w[i]);
        sink.d(i, common_d + rot * y.d[i] + ib * std::conj(red.row[i]));
    }
    sink.p0(-a * ctx.f_total * p + 2.0 * b * red.s_d.imag() + a * red.total);
}

// Stage update out = base + stage_coef * k, acc += acc_coef * k, written
// straight from the derivative.
struct AxpySink
{
    const OracleState& base;
    OracleState& out;
    OracleState& acc;
    double stage_coef;
    double acc_coef;
    std::size_t n;
    bool first = false; // acc = base + acc_coef * k instead of accumulating

    void p0(double dp)
    {
        out.p0 = base.p0 + stage_coef * dp;
        acc.p0 = (first ? base.p0 : acc.p0) + acc_coef * dp;
    }
    void d(std::size_t i, cplx v)
    {
        out.d[i] = base.d[i] + stage_coef * v;
        acc.d[i] = (first ? base.d[i] : acc.d[i]) + acc_coef * v;
    }
    void e_row(std::size_t i, const double* drow)
    {
        const double* yb = reinterpret_cast<const double*>(base.e.data()) + 2 * i * n;
        double* yo = reinterpret_cast<double*>(out.e.data()) + 2 * i * n;
        double* ya = reinterpret_cast<double*>(acc.e.data()) + 2 * i * n;
        const double* src = first ? yb : ya;
        for (std::size_t k = 0; k < 2 * n; ++k) {
            const double v = drow[k];
            ya[k] = src[k] + acc_coef * v;
            yo[k] = yb[k] + stage_coef * v;
        }
    }
};

struct StoreSink
{
    OracleDerivative& out;
    std::size_t n;

    void p0(double dp) { out.dp0 = dp; }
    void d(std::size_t i, cplx v) { out.dd[i] = v; }
    void e_row(std::size_t i, const double* drow)
    {
        for (std::size_t j = 0; j < n; ++j)
            out.de[i * n + j] = cplx(drow[2 * j], drow[2 * j + 1]);
    }
};

double max_abs_cheap(const OracleState& s)
{
    double m = std::abs(s.p0);
    const std::size_t n = s.size();
    for (std::size_t k = 0; k < n; ++k) {
        m = std::max(m, std::abs(s.d[k]));
        m = std::max(m, std::abs(s.e[k * n + k]));
    }
    return std::isfinite(m) ? m : std::numeric_limits<double>::infinity();
}

Checkpoint make_checkpoint(const OracleState& s, const ContinuumGrid& grid)
{
    Checkpoint c;
    const std::size_t n = s.size();
    c.t = s.t;
    c.p0 = s.p0;
    c.conservation_error = s.conservation_error(grid);
    c.hermiticity_error = s.hermiticity_error();
    c.e_diag.resize(n);
    c.spectrum.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        c.e_diag[k] = s.e[k * n + k].real();
        c.spectrum[k] = grid.s_values[k] * c.e_diag[k];
    }
    return c;
}

double relative_l2(const std::vector<double>& now, const std::vector<double>& before)
{
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < now.size(); ++k) {
        diff += (now[k] - before[k]) * (now[k] - before[k]);
        norm += now[k] * now[k];
    }
    if (norm == 0.0)
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff / norm);
}

} // namespace

OracleDerivative rhs(const OracleState& state, const ContinuumGrid& grid, const FieldParams& field)
{
    if (state.size() != grid.size() || state.e.size() != grid.size() * grid.size())
        throw std::invalid_argument("oracle state does not match the grid");
    const RhsContext ctx(grid, field);
    Reductions red;
    OracleDerivative out;
    const std::size_t n = grid.size();
    out.dd.resize(n);
    out.de.resize(n * n);
    StoreSink sink{out, n};
    evaluate(ctx, state, red, sink);
    return out;
}

OracleTrajectory integrate(const AtomParams& atom, const FieldParams& field,
                           const ContinuumGrid& grid, double t_final, double dt,
                           const IntegrationOptions& options)
{
    validate(field);
    if (!(t_final > 0.0) || !(dt > 0.0))
        throw ParameterError("integration needs t_final > 0 and dt > 0");
    if (!(options.checkpoint_interval > 0.0))
        throw ParameterError("checkpoint interval must be positive");

    const std::size_t n = grid.size();
    const RhsContext ctx(grid, field);
    Reductions red;

    OracleTrajectory traj;
    traj.atom = atom;
    traj.field = field;

    const auto total_steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
    const double step = t_final / static_cast<double>(total_steps);
    const auto steps_per_cp = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(options.checkpoint_interval / step)));
    traj.dt = step;

    OracleState y = OracleState::initial(n);
    OracleState stage = y;
    OracleState acc = y;

    std::vector<double> previous(n, 0.0);
    bool have_previous = false;

    for (std::size_t s = 1; s <= total_steps; ++s) {
        // k1..k4 with fused accumulation: acc collects y + dt Σ b_i k_i.
        AxpySink k1{y, stage, acc, step / 2.0, step / 6.0, n, true};
        evaluate(ctx, y, red, k1);
        AxpySink k2{y, stage, acc, step / 2.0, step / 3.0, n};
        evaluate(ctx, stage, red, k2);
        AxpySink k3{y, stage, acc, step, step / 3.0, n};
        evaluate(ctx, stage, red, k3);
        // The last stage only feeds the accumulator; stage is scratch here.
        AxpySink k4{y, stage, acc, 0.0, step / 6.0, n};
        evaluate(ctx, stage, red, k4);
        std::swap(y, acc);
        y.t = step * static_cast<double>(s);
        traj.steps = s;

        const double drift = std::abs(y.conservation_error(grid));
        traj.max_conservation_drift = std::max(traj.max_conservation_drift, drift);
        traj.p0_min = std::min(traj.p0_min, y.p0);
        traj.p0_max = std::max(traj.p0_max, y.p0);

        const double mag = max_abs_cheap(y);
        if (!(mag <= options.blowup_limit)) {
            std::ostringstream msg;
            msg << "oracle integration unstable at t = " << y.t << " (|state| = " << mag
                << "); reduce dt below " << step << " (the step rule gives "
                << max_stable_step(grid, field) << ")";
            throw StepSizeError(msg.str());
        }

        if (s % steps_per_cp == 0 || s == total_steps) {
            Checkpoint cp = make_checkpoint(y, grid);
            traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, cp.hermiticity_error);
            y.symmetrize();
            cp.spectrum_change = have_previous ? relative_l2(cp.spectrum, previous)
                                               : std::numeric_limits<double>::infinity();
            previous = cp.spectrum;
            have_previous = true;
            const bool settled = cp.spectrum_change < options.convergence_tol;
            if (options.on_checkpoint)
                options.on_checkpoint(cp);
            traj.checkpoints.push_back(std::move(cp));
            if (settled) {
                traj.converged = true;
                if (options.stop_on_convergence)
                    break;
            } else {
                traj.converged = false;
            }
        }
    }
    traj.final_state = std::move(y);
    return traj;
}

Spectrum spectrum_oracle(const OracleTrajectory& trajectory, const ContinuumGrid& grid)
{
    if (trajectory.checkpoints.empty())
        throw ConvergenceError("oracle trajectory has no checkpoints");
    if (!trajectory.converged) {
        const Checkpoint& last = trajectory.checkpoints.back();
        std::ostringstream msg;
        msg << "oracle spectrum not converged at t = " << last.t << ": relative change "
            << last.spectrum_change << " between the last two checkpoints (p0 = " << last.p0
            << "); raise t_final or refine the grid";
        throw ConvergenceError(msg.str());
    }
    const Checkpoint& last = trajectory.checkpoints.back();
    Spectrum out;
    out.omegas = grid.points;
    out.values.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double v = last.spectrum[k];
        out.values[k] = v < 0.0 && v >= -1e-9 ? 0.0 : v;
    }
    out.provenance = {trajectory.atom, trajectory.field, "oracle"};
    return out;
}

void write_checkpoint_csv(std::ostream& out, const Checkpoint& checkpoint,
                          const ContinuumGrid& grid)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", checkpoint.t);
    out << "# t=" << buf;
    std::snprintf(buf, sizeof buf, "%.17g", checkpoint.p0);
    out << " p0=" << buf << '\n' << "omega,e_diag\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        char row[96];
        std::snprintf(row, sizeof row, "%.17g,%.17g\n", grid.points[k], checkpoint.e_diag[k]);
        out << row;
    }
}

OracleSettings resolve_oracle_settings(const AtomParams& atom, const FieldParams& field,
                                       const OracleSettings& partial)
{
    const DerivedParams derived = derive_params(atom);
    OracleSettings s = partial;
    if (!s.window)
        s.window = default_window(field, derived);
    if (!s.checkpoint_interval)
        s.checkpoint_interval = 10.0 / derived.gamma_total;
    const ContinuumGrid grid = build_grid(s.window->lo, s.window->hi, s.n_points, derived);
    if (!s.dt) {
        const double rule = max_stable_step(grid, field);
        const double per_cp = std::ceil(*s.checkpoint_interval / rule - 1e-9);
        s.dt = *s.checkpoint_interval / per_cp;
    }
    if (!s.t_final) {
        // Whole checkpoint intervals below 0.9 × recurrence time.
        const double limit = 0.9 * recurrence_time(grid);
        const double cps = std::max(1.0, std::floor(limit / *s.checkpoint_interval));
        s.t_final = cps * *s.checkpoint_interval;
    }
    return s;
}

OracleRun run_oracle(const AtomParams& atom, const FieldParams& field,
                     const OracleSettings& settings, const IntegrationOptions& options)
{
    const OracleSettings s = resolve_oracle_settings(atom, field, settings);
    const DerivedParams derived = derive_params(atom);
    OracleRun run;
    run.grid = build_grid(s.window->lo, s.window->hi, s.n_points, derived);
    IntegrationOptions opts = options;
    opts.checkpoint_interval = *s.checkpoint_interval;
    run.trajectory = integrate(atom, field, run.grid, *s.t_final, *s.dt, opts);
    run.spectrum = spectrum_oracle(run.trajectory, run.grid);
    return run;
}

} // namespace dfano
