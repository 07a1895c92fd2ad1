#ifndef DFANO_CONTINUUM_ORACLE_HPP
#define DFANO_CONTINUUM_ORACLE_HPP

#include "dfano/dressed_continuum.hpp"
#include "dfano/spectrum.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace dfano
{
// Uniform trapezoid discretisation of the continuum with S(ω) precomputed.
struct ContinuumGrid
{
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<double> s_values;
    double omega_min = 0.0;
    double omega_max = 0.0;

    std::size_t size() const { return points.size(); }
    double spacing() const { return (omega_max - omega_min) / static_cast<double>(size() - 1); }
    // F = Σ w_k S(ω_k); depends on the window whenever q is finite.
    double total_coupling() const;
    double max_form_factor() const;
};

ContinuumGrid build_grid(double omega_min, double omega_max, std::size_t n,
                         const DerivedParams& derived);

struct Window
{
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Window&) const = default;
};

// [ω_L - 12Γ, ω_L + 12Γ], widened so both resonances keep 8Γ of margin.
Window default_window(const FieldParams& field, const DerivedParams& derived);

// 0.1 / max(largest detuning from ω_L, window width, aF, b sqrt(max S * width)).
double max_stable_step(const ContinuumGrid& grid, const FieldParams& field);

// 2π / grid spacing: beyond this the discrete continuum revives.
double recurrence_time(const ContinuumGrid& grid);

// Exactly averaged populations and coherences on the grid. e is the dense
// row-major N×N matrix of continuum coherences; D+ is carried as conj(d).
struct OracleState
{
    double t = 0.0;
    double p0 = 1.0;
    std::vector<cplx> d;
    std::vector<cplx> e;

    static OracleState initial(std::size_t n);
    std::size_t size() const { return d.size(); }
    const cplx& e_at(std::size_t i, std::size_t j) const { return e[i * size() + j]; }

    // p0 + Σ w S Re(e_kk) - 1.
    double conservation_error(const ContinuumGrid& grid) const;
    double hermiticity_error() const;
    void symmetrize();
};

struct OracleDerivative
{
    double dp0 = 0.0;
    std::vector<cplx> dd;
    std::vector<cplx> de;
};

// Right-hand side of the averaged equations of motion with integrals replaced
// by grid sums, a = 8 a0.
OracleDerivative rhs(const OracleState& state, const ContinuumGrid& grid, const FieldParams& field);

struct Checkpoint
{
    double t = 0.0;
    double p0 = 0.0;
    double conservation_error = 0.0;
    double hermiticity_error = 0.0;
    std::vector<double> e_diag;
    std::vector<double> spectrum;   // S_k Re(e_kk)
    double spectrum_change = 0.0;   // relative L2 change since the previous checkpoint
};

struct IntegrationOptions
{
    double checkpoint_interval = 10.0;
    double convergence_tol = 0.005;
    bool stop_on_convergence = true;
    double blowup_limit = 1e6;
    std::function<void(const Checkpoint&)> on_checkpoint;
};

struct OracleTrajectory
{
    AtomParams atom;
    FieldParams field;
    std::vector<Checkpoint> checkpoints;
    OracleState final_state;
    bool converged = false;
    double dt = 0.0;
    std::size_t steps = 0;
    double max_conservation_drift = 0.0; // over every step
    double max_hermiticity_error = 0.0;  // over checkpoints, before re-symmetrisation
    double p0_min = 1.0;
    double p0_max = 1.0;
};

// Classic fixed-step RK4 from P0 = 1, D = E = 0. Checkpoints every
// checkpoint_interval (rounded to whole steps) and at t_final; stops early
// once the spectrum changes by less than convergence_tol between checkpoints.
OracleTrajectory integrate(const AtomParams& atom, const FieldParams& field,
                           const ContinuumGrid& grid, double t_final, double dt,
                           const IntegrationOptions& options = {});

// W_k = S_k Re(e_kk) from the last checkpoint, clipped at -1e-9. Throws
// ConvergenceError when the run did not converge.
Spectrum spectrum_oracle(const OracleTrajectory& trajectory, const ContinuumGrid& grid);

// Textual snapshot: comment header with t and p0, then omega,e_diag rows.
void write_checkpoint_csv(std::ostream& out, const Checkpoint& checkpoint,
                          const ContinuumGrid& grid);

// Oracle run settings; empty optionals resolve to the defaults above.
struct OracleSettings
{
    std::optional<Window> window;
    std::size_t n_points = 401;
    std::optional<double> dt;
    std::optional<double> t_final;
    std::optional<double> checkpoint_interval;

    bool operator==(const OracleSettings&) const = default;
};

// Fills every optional: default window, the step rule (shrunk so the
// checkpoint interval is a whole number of steps), t_final = 0.9 × recurrence
// time, checkpoint interval 10/Γ.
OracleSettings resolve_oracle_settings(const AtomParams& atom, const FieldParams& field,
                                       const OracleSettings& partial);

struct OracleRun
{
    ContinuumGrid grid;
    OracleTrajectory trajectory;
    Spectrum spectrum;
};

// build_grid + integrate + spectrum_oracle with resolved settings.
OracleRun run_oracle(const AtomParams& atom, const FieldParams& field,
                     const OracleSettings& settings, const IntegrationOptions& options = {});

} // namespace dfano

#endif
