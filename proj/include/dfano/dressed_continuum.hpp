#ifndef DFANO_DRESSED_CONTINUUM_HPP
#define DFANO_DRESSED_CONTINUUM_HPP

#include <complex>
#include <optional>

namespace dfano
{
using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

// Asymmetry parameters of the two autoionizing states. An empty optional
// selects the joint q1 = q2 -> infinity limit.
struct AsymmetryParams
{
    double q1 = 0.0;
    double q2 = 0.0;

    bool operator==(const AsymmetryParams&) const = default;
};

// Bare two-level-plus-continuum atom. Energies and widths are in units of the
// reference width the caller normalises to.
struct AtomParams
{
    double omega1 = 0.0;
    double omega2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    std::optional<AsymmetryParams> q; // nullopt: infinite asymmetry

    bool infinite_q() const { return !q.has_value(); }
    bool operator==(const AtomParams&) const = default;
};

// Laser: carrier frequency, coherent amplitude b = |E0| and chaotic strength
// a0 = a/8, where a is the white-noise correlation strength.
struct FieldParams
{
    double omega_laser = 0.0;
    double b = 0.0;
    double a0 = 0.0;

    double noise_strength() const { return 8.0 * a0; }
    bool operator==(const FieldParams&) const = default;
};

// Closed-form structural quantities of the dressed double-Fano continuum.
struct DerivedParams
{
    double gamma_total = 0.0;       // Γ = Γ1 + Γ2
    std::optional<double> q_eff;    // Q; nullopt in the infinite-q limit
    double theta = 0.0;             // real splitting of the complex roots
    double phi = 0.0;               // width splitting of the complex roots
    cplx omega_plus;
    cplx omega_minus;
    cplx k_coef;
    cplx a_plus;
    cplx a_minus;
    cplx b_plus;
    cplx b_minus;
    cplx c_coef;

    // 1/(Q+i), 1/(Q-i) and 1/(Q^2+1); all zero for infinite q.
    cplx background;
    cplx background_conj;
    double background_sq = 0.0;

    // False when A- is below the removable-singularity guard and every
    // A-/(ω-ω-) style term is dropped.
    bool minus_branch_active = true;
};

// |A-| at or below this fraction of Γ counts as an exact zero.
inline constexpr double kMinusBranchGuard = 1e-14;

void validate(const AtomParams& atom);
void validate(const FieldParams& field);

// Γ, Q, θ, φ, ω±, K, A±, B± and c. Throws ParameterError for a nonpositive
// total width, negative widths, the exceptional point θ = φ = 0, or a real
// ω- pole carrying nonzero weight.
DerivedParams derive_params(const AtomParams& atom);

// Effective Rabi coupling to the dressed continuum with Ω0 = 1:
// (A+/(ω-ω+) + A-/(ω-ω-) + 1/(Q+i)) / sqrt(4πΓ).
cplx rabi_coupling(double omega, const DerivedParams& derived);

// Continuum form factor S(ω) = |rabi_coupling(ω)|^2.
double form_factor(double omega, const DerivedParams& derived);

} // namespace dfano

#endif
