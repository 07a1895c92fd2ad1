#ifndef DFANO_SPECTRAL_ENGINE_HPP
#define DFANO_SPECTRAL_ENGINE_HPP

#include "dfano/dressed_continuum.hpp"
#include "dfano/spectrum.hpp"

#include <span>
#include <string>
#include <vector>

namespace dfano
{
// How the D- companion of the D+ equation is built from it. Literal applies
// only A- -> A+, H- -> H+ (and D+ <-> D-); Conjugated additionally takes
// g -> g* and flips the sign of the ib term.
enum class DMinusVariant
{
    Literal,
    Conjugated
};

// Frequency argument of the H factors inside the D+/D- equations.
// GridFrequency evaluates them at the spectral ω, LiteralMinusI at the
// complex point -iω, LaserFrequency at ω_L.
enum class HMinusArgument
{
    GridFrequency,
    LiteralMinusI,
    LaserFrequency
};

// Knobs of the closed-form chain. Defaults reproduce the printed formulas.
struct ClosedFormOptions
{
    DMinusVariant d_minus_variant = DMinusVariant::Conjugated;
    HMinusArgument h_minus_argument = HMinusArgument::GridFrequency;
    double noise_factor = 4.0;      // coefficient of a0*P0 in the ζ/η source terms
    double z_star = 1e-8;           // regularised evaluation point for z -> 0
    double pole_threshold = 1e-12;  // |denominator| floor, in units of Γ
    double condition_cap = 1e12;
    double pole_snap = 1e-6;        // grid points this close (×Γ) to an on-axis pole are averaged

    bool operator==(const ClosedFormOptions&) const = default;
};

std::string to_string(DMinusVariant v);
std::string to_string(HMinusArgument v);
DMinusVariant parse_d_minus_variant(const std::string& s);
HMinusArgument parse_h_minus_argument(const std::string& s);

// d(z, ω). The frequency may be complex to support the literal -iω argument.
cplx kernel_d(cplx z, cplx omega, const DerivedParams& derived, double pole_threshold = 1e-12);
cplx kernel_e(cplx z, const DerivedParams& derived, const FieldParams& field,
              double pole_threshold = 1e-12);
cplx kernel_f(cplx z, const DerivedParams& derived, double pole_threshold = 1e-12);
cplx kernel_g(cplx z, const DerivedParams& derived, const FieldParams& field,
              double pole_threshold = 1e-12);

struct HFactors
{
    cplx plus;
    cplx minus;
};

// H+ = 1 + a0 d + b² d / (4 [z + a0 c + i(ω_L - ω)]) and its partner built
// from d* and c*.
HFactors h_factors(cplx z, cplx omega, const DerivedParams& derived, const FieldParams& field,
                   double pole_threshold = 1e-12);

// Laplace-domain unknowns at one z, plus solve diagnostics.
struct SteadyAmplitudes
{
    cplx z;
    cplx p0;
    cplx a_minus_amp;
    cplx a_plus_amp;
    cplx d_plus_amp;
    cplx d_minus_amp;

    double eval_omega = 0.0;         // frequency fed to the H factors of the D± rows
    double residual = 0.0;           // relative back-substitution residual
    double condition = 0.0;          // 2-norm condition of the row-equilibrated matrix
    double conjugation_mismatch = 0.0; // |D- - conj(D+)| / (|D+| + eps)
};

// Solves the 5x5 system for (P0, A+, A-, D+, D-): the D+ equation, its D-
// companion, both A± equations and the P0 equation multiplied through by z.
SteadyAmplitudes solve_steady(const DerivedParams& derived, const FieldParams& field, cplx z,
                              double eval_omega, const ClosedFormOptions& options = {});

// ζ_ω at the z of a solved system.
cplx zeta_at(double omega, const SteadyAmplitudes& steady, const DerivedParams& derived,
             const FieldParams& field, const ClosedFormOptions& options = {});

// W(ω) = S(ω) |2 Re ζ_ω(z*)| on an ascending grid. Numerical errors are
// rethrown with the offending ω in the message.
Spectrum spectrum_analytic(const AtomParams& atom, const FieldParams& field,
                           std::span<const double> grid, const ClosedFormOptions& options = {});

// Self-consistency figures of the closed-form chain over a grid.
struct AnalyticDiagnostics
{
    double max_residual = 0.0;
    double max_condition = 0.0;
    double max_conjugation_mismatch = 0.0;
    double max_h_conjugation_mismatch = 0.0; // |H- - conj(H+)| / |H+| at z*
    double z_convergence = 0.0;              // max pointwise relative change z* -> z*/10
    double total_weight = 0.0;               // ∫ W dω over the grid
    double p0_residue = 0.0;                 // Re(z* P0(z*)) at the first grid point
    std::vector<std::string> warnings;
};

AnalyticDiagnostics analytic_diagnostics(const AtomParams& atom, const FieldParams& field,
                                         std::span<const double> grid,
                                         const ClosedFormOptions& options = {});

} // namespace dfano

#endif
