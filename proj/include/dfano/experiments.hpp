#ifndef DFANO_EXPERIMENTS_HPP
#define DFANO_EXPERIMENTS_HPP

#include "dfano/continuum_oracle.hpp"
#include "dfano/spectral_engine.hpp"
#include "dfano/spectrum.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dfano
{
enum class SweptParameter
{
    B,
    A0
};

enum class Method
{
    Analytic,
    Oracle
};

std::string to_string(SweptParameter p);
std::string to_string(Method m);

struct GridSpec
{
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::size_t n_points = 0;

    std::vector<double> points() const { return uniform_grid(omega_min, omega_max, n_points); }
    bool operator==(const GridSpec&) const = default;
};

// One figure-style family: a base parameter set with b or a0 swept.
struct SweepSpec
{
    AtomParams base_atom;
    FieldParams base_field;
    SweptParameter swept = SweptParameter::B;
    std::vector<double> values;
    GridSpec grid;
    std::vector<Method> methods{Method::Analytic};
    ClosedFormOptions closed_form;
    OracleSettings oracle;
};

void validate(const SweepSpec& spec);

FieldParams with_value(const FieldParams& base, SweptParameter p, double value);

struct SweepCell
{
    double value = 0.0;
    Method method = Method::Analytic;
    std::optional<Spectrum> spectrum; // empty when the cell failed
    std::string error;
};

// Cells ordered by value, then by method in the order of spec.methods.
struct SweepResult
{
    std::vector<SweepCell> cells;
};

// Runs every (value, method) cell, concurrently when workers allow. Oracle
// spectra are resampled onto spec.grid. A failing cell records its error and
// the sweep carries on.
SweepResult run_sweep(const SweepSpec& spec, unsigned max_workers = 0);

struct Peak
{
    std::size_t index = 0;
    double location = 0.0;
    double height = 0.0;
    double width = 0.0;      // full width at half height, linearly interpolated
    double prominence = 0.0;
    bool wedge = false;      // cusp-like top, see DiagnoseOptions
};

struct Minimum
{
    std::size_t index = 0;
    double location = 0.0;
    double value = 0.0;
};

struct SpectrumDiagnostics
{
    std::vector<Peak> peaks;       // ascending location
    std::vector<Minimum> minima;   // interior local minima, ascending location
    double asymmetry = 0.0;        // |∫left W - ∫right W| / ∫W about the global maximum
    double total_weight = 0.0;     // ∫W dω
    bool any_wedge() const;
};

struct DiagnoseOptions
{
    double prominence_fraction = 0.01; // of the global maximum
    std::size_t min_separation = 3;    // grid steps
    double wedge_ratio = 10.0;         // peak |Δ²W| over the flank median
    std::size_t flank_points = 5;      // per side, starting two steps away from the peak
};

SpectrumDiagnostics diagnose(const Spectrum& spectrum, const DiagnoseOptions& options = {});

// Minimum of W over [lo, hi] (inclusive), or nullopt when no grid point falls
// inside.
std::optional<Minimum> minimum_between(const Spectrum& spectrum, double lo, double hi);

struct Comparison
{
    double l2_distance = 0.0;   // ‖a - o‖ / mean(‖a‖, ‖o‖) after unit-integral normalisation
    double max_deviation = 0.0; // max |a - o| after normalisation
    double analytic_integral = 0.0;
    double oracle_integral = 0.0;
};

// Shape-only comparison on identical grids. Throws std::invalid_argument on a
// grid mismatch.
Comparison compare(const Spectrum& analytic, const Spectrum& oracle);

// Linear interpolation of a spectrum onto another ascending grid; points
// outside the source window get 0.
Spectrum resample(const Spectrum& spectrum, const std::vector<double>& grid);

enum class Trend
{
    Increasing,
    Decreasing,
    NonMonotone,
    Undetermined // fewer than two points on the track
};

std::string to_string(Trend t);

struct PeakTrack
{
    std::vector<std::size_t> sweep_index;
    std::vector<double> locations;
    std::vector<double> heights;
    Trend trend = Trend::Undetermined;
};

struct TrendReport
{
    std::vector<PeakTrack> tracks;            // by first sweep index, then initial location
    std::vector<std::size_t> transitions;     // sweep indices where the peak count changed
};

// Nearest-location matching of peaks between consecutive sweep values.
TrendReport trend_check(const std::vector<double>& values,
                        const std::vector<SpectrumDiagnostics>& diagnostics);

Trend classify(const std::vector<double>& heights);

} // namespace dfano

#endif
