#include "dfano/spectral_engine.hpp"

#include "dfano/errors.hpp"
#include "parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfano
{
namespace
{
cplx checked(cplx denom, double floor, const char* what)
{
    if (!(std::abs(denom) >= floor)) {
        std::ostringstream msg;
        msg << "pole proximity in " << what << ": |denominator| = " << std::abs(denom)
            << " below " << floor;
        throw PoleProximityError(msg.str());
    }
    return denom;
}

// Sum over the two resonance branches of B±/(denom±) plus the flat
// 1/(Q²+1) background, all divided by Γ. Shared shape of d, e and f.
template <class DenomFn>
cplx resonance_sum(const DerivedParams& p, double pole_threshold, const char* what, DenomFn denom)
{
    const double floor = pole_threshold * p.gamma_total;
    cplx sum = p.b_plus / checked(denom(p.omega_plus), floor, what);
    if (p.minus_branch_active)
        sum += p.b_minus / checked(denom(p.omega_minus), floor, what);
    sum += p.background_sq;
    return sum / p.gamma_total;
}

cplx h_argument(double omega, const FieldParams& field, HMinusArgument arg)
{
    switch (arg) {
    case HMinusArgument::GridFrequency:
        return omega;
    case HMinusArgument::LiteralMinusI:
        return -kI * omega;
    case HMinusArgument::LaserFrequency:
        return field.omega_laser;
    }
    return omega;
}

using Matrix5 = Eigen::Matrix<cplx, 5, 5>;
using Vector5 = Eigen::Matrix<cplx, 5, 1>;

enum Unknown
{
    kP0 = 0,
    kAPlus = 1,
    kAMinus = 2,
    kDPlus = 3,
    kDMinus = 4
};

template <class E>
[[noreturn]] void rethrow_at(const E& err, double omega)
{
    std::ostringstream msg;
    msg << err.what() << " (at omega = " << omega << ")";
    throw E(msg.str());
}

} // namespace

std::string to_string(DMinusVariant v)
{
    return v == DMinusVariant::Literal ? "literal" : "conjugated";
}

std::string to_string(HMinusArgument v)
{
    switch (v) {
    case HMinusArgument::GridFrequency:
        return "grid";
    case HMinusArgument::LiteralMinusI:
        return "minus_i_omega";
    case HMinusArgument::LaserFrequency:
        return "laser";
    }
    return "grid";
}

DMinusVariant parse_d_minus_variant(const std::string& s)
{
    if (s == "literal")
        return DMinusVariant::Literal;
    if (s == "conjugated")
        return DMinusVariant::Conjugated;
    throw std::invalid_argument("unknown D- variant '" + s + "' (expected literal|conjugated)");
}

HMinusArgument parse_h_minus_argument(const std::string& s)
{
    if (s == "grid")
        return HMinusArgument::GridFrequency;
    if (s == "minus_i_omega")
        return HMinusArgument::LiteralMinusI;
    if (s == "laser")
        return HMinusArgument::LaserFrequency;
    throw std::invalid_argument("unknown H argument '" + s + "' (expected grid|minus_i_omega|laser)");
}

cplx kernel_d(cplx z, cplx omega, const DerivedParams& derived, double pole_threshold)
{
    return resonance_sum(derived, pole_threshold, "d(z, omega)",
                         [&](cplx pole) { return pole - omega - kI * z; });
}

cplx kernel_e(cplx z, const DerivedParams& derived, const FieldParams& field, double pole_threshold)
{
    const cplx shift = kI * field.a0 * std::conj(derived.c_coef);
    return resonance_sum(derived, pole_threshold, "e(z)", [&](cplx pole) {
        return pole - field.omega_laser - shift - kI * z;
    });
}

cplx kernel_f(cplx z, const DerivedParams& derived, double pole_threshold)
{
    return resonance_sum(derived, pole_threshold, "f(z)",
                         [&](cplx pole) { return 2.0 * pole - kI * z; });
}

cplx kernel_g(cplx z, const DerivedParams& derived, const FieldParams& field, double pole_threshold)
{
    const double floor = pole_threshold * derived.gamma_total;
    const cplx base = z + field.a0 * derived.c_coef;
    return 1.0 / checked(base + kI * (derived.omega_plus - field.omega_laser), floor, "g(z)") +
           1.0 / checked(base + kI * (derived.omega_minus - field.omega_laser), floor, "g(z)");
}

HFactors h_factors(cplx z, cplx omega, const DerivedParams& derived, const FieldParams& field,
                   double pole_threshold)
{
    const cplx d = kernel_d(z, omega, derived, pole_threshold);
    const cplx dc = std::conj(d);
    HFactors h{1.0 + field.a0 * d, 1.0 + field.a0 * dc};
    if (field.b > 0.0) {
        const double floor = pole_threshold * derived.gamma_total;
        const double b2 = field.b * field.b;
        const cplx inner_plus =
            checked(z + field.a0 * derived.c_coef + kI * (field.omega_laser - omega), floor, "H+");
        const cplx inner_minus = checked(
            z + field.a0 * std::conj(derived.c_coef) - kI * (field.omega_laser - omega), floor, "H-");
        h.plus += b2 * d / (4.0 * inner_plus);
        h.minus += b2 * dc / (4.0 * inner_minus);
    }
    return h;
}

SteadyAmplitudes solve_steady(const DerivedParams& derived, const FieldParams& field, cplx z,
                              double eval_omega, const ClosedFormOptions& options)
{
    const double thr = options.pole_threshold;
    const double a0 = field.a0;
    const double b = field.b;
    const cplx ib = kI * b;

    const HFactors h =
        h_factors(z, h_argument(eval_omega, field, options.h_minus_argument), derived, field, thr);
    const cplx e = kernel_e(z, derived, field, thr);
    const cplx f = kernel_f(z, derived, thr);
    const cplx g = b > 0.0 ? kernel_g(z, derived, field, thr) : cplx{};
    const cplx ec = std::conj(e);
    const cplx fc = std::conj(f);
    const double source = options.noise_factor * a0;

    Matrix5 m = Matrix5::Zero();
    Vector5 rhs = Vector5::Zero();

    // D+ equation.
    m(0, kP0) = source;
    m(0, kAMinus) = ib * g;
    m(0, kDPlus) = h.minus;
    m(0, kDMinus) = h.minus - 1.0;

    // D- companion.
    m(1, kP0) = source;
    m(1, kAPlus) = options.d_minus_variant == DMinusVariant::Literal ? ib * g : -ib * std::conj(g);
    m(1, kDMinus) = h.plus;
    m(1, kDPlus) = h.plus - 1.0;

    // A-(z) and A+(z).
    const cplx couple_minus = kI * a0 * b * e * f / 4.0;
    m(2, kP0) = ib;
    m(2, kAMinus) = 1.0 + a0 * e;
    m(2, kDPlus) = -couple_minus;
    m(2, kDMinus) = -couple_minus;

    const cplx couple_plus = kI * a0 * b * ec * fc / 4.0;
    m(3, kP0) = -ib;
    m(3, kAPlus) = 1.0 + a0 * ec;
    m(3, kDPlus) = couple_plus;
    m(3, kDMinus) = couple_plus;

    // P0 equation times z.
    const cplx dsum = (b * b * e * f + b * b * ec * fc + f) / 16.0;
    m(4, kP0) = z + 2.0 * a0 * derived.c_coef;
    m(4, kAPlus) = -ib * ec / 4.0;
    m(4, kAMinus) = ib * e / 4.0;
    m(4, kDPlus) = dsum;
    m(4, kDMinus) = dsum;
    rhs(4) = 1.0;

    Matrix5 scaled = m;
    for (int r = 0; r < 5; ++r) {
        const double row_max = scaled.row(r).cwiseAbs().maxCoeff();
        if (row_max > 0.0)
            scaled.row(r) /= row_max;
    }
    const Eigen::JacobiSVD<Matrix5> svd(scaled);
    const auto& sv = svd.singularValues();
    const double condition = sv(4) > 0.0 ? sv(0) / sv(4) : std::numeric_limits<double>::infinity();
    if (!(condition <= options.condition_cap)) {
        std::ostringstream msg;
        msg << "singular steady-state system: condition number " << condition << " exceeds "
            << options.condition_cap << " (z = " << z << ", b = " << b << ", a0 = " << a0 << ")";
        throw SingularSystemError(msg.str());
    }

    const Vector5 x = m.fullPivLu().solve(rhs);

    SteadyAmplitudes s;
    s.z = z;
    s.p0 = x(kP0);
    s.a_plus_amp = x(kAPlus);
    s.a_minus_amp = x(kAMinus);
    s.d_plus_amp = x(kDPlus);
    s.d_minus_amp = x(kDMinus);
    s.eval_omega = eval_omega;
    s.condition = condition;
    const double scale = m.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff() +
                         rhs.cwiseAbs().maxCoeff();
    s.residual = (m * x - rhs).cwiseAbs().maxCoeff() / scale;
    s.conjugation_mismatch =
        std::abs(s.d_minus_amp - std::conj(s.d_plus_amp)) / (std::abs(s.d_plus_amp) + 1e-30);
    return s;
}

cplx zeta_at(double omega, const SteadyAmplitudes& steady, const DerivedParams& derived,
             const FieldParams& field, const ClosedFormOptions& options)
{
    const double thr = options.pole_threshold;
    const cplx z = steady.z;
    const HFactors h = h_factors(z, omega, derived, field, thr);
    const double floor = thr * derived.gamma_total;
    checked(h.plus, floor, "H+ in zeta");

    cplx numer = options.noise_factor * field.a0 * steady.p0;
    if (field.b > 0.0) {
        const cplx inner =
            checked(z + field.a0 * derived.c_coef + kI * (field.omega_laser - omega), floor, "zeta");
        numer -= kI * field.b * steady.a_plus_amp / inner;
    }
    numer += steady.d_plus_amp * (h.plus - 1.0);
    return numer / h.plus;
}

namespace
{
struct PointResult
{
    double value = 0.0;
    bool at_pole = false;
};

bool near_axis_pole(double omega, const DerivedParams& derived, const FieldParams& field,
                    double snap)
{
    const cplx detune = kI * (field.omega_laser - omega);
    const cplx shift = field.a0 * derived.c_coef;
    const double floor = snap * derived.gamma_total;
    return std::abs(shift + detune) < floor || std::abs(std::conj(shift) - detune) < floor;
}

PointResult evaluate_point(double omega, const DerivedParams& derived, const FieldParams& field,
                           const ClosedFormOptions& options, const SteadyAmplitudes* shared,
                           double z)
{
    PointResult r;
    if (field.b == 0.0 && field.a0 == 0.0)
        return r;
    if (field.b > 0.0 && near_axis_pole(omega, derived, field, options.pole_snap)) {
        r.at_pole = true;
        return r;
    }
    const SteadyAmplitudes steady =
        shared ? *shared : solve_steady(derived, field, z, omega, options);
    const cplx zeta = zeta_at(omega, steady, derived, field, options);
    r.value = form_factor(omega, derived) * std::abs(2.0 * zeta.real());
    return r;
}

std::vector<double> analytic_values(const DerivedParams& derived, const FieldParams& field,
                                    std::span<const double> grid, const ClosedFormOptions& options,
                                    double z)
{
    const std::size_t n = grid.size();
    std::vector<PointResult> points(n);

    std::optional<SteadyAmplitudes> shared;
    const bool driven = field.b > 0.0 || field.a0 > 0.0;
    if (driven && options.h_minus_argument == HMinusArgument::LaserFrequency)
        shared = solve_steady(derived, field, z, field.omega_laser, options);

    detail::parallel_for(n, [&](std::size_t i) {
        try {
            points[i] = evaluate_point(grid[i], derived, field, options,
                                       shared ? &*shared : nullptr, z);
        } catch (const PoleProximityError& err) {
            rethrow_at(err, grid[i]);
        } catch (const SingularSystemError& err) {
            rethrow_at(err, grid[i]);
        }
    });

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = points[i].value;
    // On-axis poles: replace by the mean of the regular neighbours.
    for (std::size_t i = 0; i < n; ++i) {
        if (!points[i].at_pole)
            continue;
        double sum = 0.0;
        int count = 0;
        if (i > 0 && !points[i - 1].at_pole) {
            sum += points[i - 1].value;
            ++count;
        }
        if (i + 1 < n && !points[i + 1].at_pole) {
            sum += points[i + 1].value;
            ++count;
        }
        values[i] = count ? sum / count : 0.0;
    }
    return values;
}

void check_grid(std::span<const double> grid)
{
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("spectral grid must be strictly increasing");
}

} // namespace

Spectrum spectrum_analytic(const AtomParams& atom, const FieldParams& field,
                           std::span<const double> grid, const ClosedFormOptions& options)
{
    validate(field);
    check_grid(grid);
    const DerivedParams derived = derive_params(atom);

    Spectrum out;
    out.omegas.assign(grid.begin(), grid.end());
    out.values = analytic_values(derived, field, grid, options, options.z_star);
    out.provenance = {atom, field, "analytic"};
    return out;
}

AnalyticDiagnostics analytic_diagnostics(const AtomParams& atom, const FieldParams& field,
                                         std::span<const double> grid,
                                         const ClosedFormOptions& options)
{
    validate(field);
    check_grid(grid);
    const DerivedParams derived = derive_params(atom);
    AnalyticDiagnostics diag;
    if (grid.empty())
        return diag;

    const double z1 = options.z_star;
    const double z2 = options.z_star / 10.0;
    const auto w1 = analytic_values(derived, field, grid, options, z1);
    const auto w2 = analytic_values(derived, field, grid, options, z2);
    const double wmax = *std::max_element(w1.begin(), w1.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (w1[i] > 1e-6 * wmax && wmax > 0.0)
            diag.z_convergence = std::max(diag.z_convergence, std::abs(w1[i] - w2[i]) / w1[i]);
    }
    diag.total_weight = integrate_trapezoid(std::vector<double>(grid.begin(), grid.end()), w1);

    const bool driven = field.b > 0.0 || field.a0 > 0.0;
    for (std::size_t i = 0; i < grid.size() && driven; ++i) {
        if (field.b > 0.0 && near_axis_pole(grid[i], derived, field, options.pole_snap))
            continue;
        const SteadyAmplitudes s = solve_steady(derived, field, z1, grid[i], options);
        diag.max_residual = std::max(diag.max_residual, s.residual);
        diag.max_condition = std::max(diag.max_condition, s.condition);
        if (field.b > 0.0 && field.a0 > 0.0)
            diag.max_conjugation_mismatch =
                std::max(diag.max_conjugation_mismatch, s.conjugation_mismatch);
        const HFactors h = h_factors(z1, grid[i], derived, field, options.pole_threshold);
        diag.max_h_conjugation_mismatch = std::max(
            diag.max_h_conjugation_mismatch, std::abs(h.minus - std::conj(h.plus)) / std::abs(h.plus));
        if (i == 0)
            diag.p0_residue = (z1 * s.p0).real();
        if (std::abs(s.p0.imag()) > 1e-8 * std::max(1.0, std::abs(s.p0)) && diag.warnings.empty())
            diag.warnings.push_back("Im(P0) not negligible at real z: transcription suspect");
    }
    if (diag.max_conjugation_mismatch > 1e-6)
        diag.warnings.push_back("D- differs from conj(D+) beyond 1e-6: formula-transcription warning");
    if (diag.max_residual > 1e-10)
        diag.warnings.push_back("steady-state residual above 1e-10");
    if (diag.z_convergence > 1e-3)
        diag.warnings.push_back("z -> 0 regularisation not converged to 0.1%");
    return diag;
}

} // namespace dfano
