#include "dfano/dressed_continuum.hpp"

#include "dfano/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dfano
{
void validate(const AtomParams& atom)
{
    if (!std::isfinite(atom.omega1) || !std::isfinite(atom.omega2) ||
        !std::isfinite(atom.gamma1) || !std::isfinite(atom.gamma2))
        throw ParameterError("atom parameters must be finite");
    if (atom.gamma1 < 0.0 || atom.gamma2 < 0.0)
        throw ParameterError("autoionization widths must be nonnegative");
    if (!(atom.gamma1 + atom.gamma2 > 0.0))
        throw ParameterError("total width must be positive");
    if (atom.q && (!std::isfinite(atom.q->q1) || !std::isfinite(atom.q->q2)))
        throw ParameterError("finite asymmetry parameters must be finite numbers");
}

void validate(const FieldParams& field)
{
    if (!std::isfinite(field.omega_laser) || !std::isfinite(field.b) || !std::isfinite(field.a0))
        throw ParameterError("field parameters must be finite");
    if (field.b < 0.0)
        throw ParameterError("coherent amplitude b must be nonnegative");
    if (field.a0 < 0.0)
        throw ParameterError("chaotic strength a0 must be nonnegative");
}

DerivedParams derive_params(const AtomParams& atom)
{
    validate(atom);

    DerivedParams p;
    const double g1 = atom.gamma1;
    const double g2 = atom.gamma2;
    const double gamma = g1 + g2;
    const double w21 = atom.omega2 - atom.omega1;
    p.gamma_total = gamma;

    // Principal branches at both nesting levels.
    const double w21sq = w21 * w21;
    const double outer = std::sqrt((w21sq - gamma * gamma) * (w21sq - gamma * gamma) +
                                   4.0 * w21sq * (g2 - g1) * (g2 - g1));
    p.phi = std::sqrt(std::max(0.0, outer - w21sq + gamma * gamma) / 2.0);
    p.theta = std::sqrt(std::max(0.0, outer + w21sq - gamma * gamma) / 2.0);

    const double wsum = atom.omega1 + atom.omega2;
    p.omega_plus = cplx((wsum + p.theta) / 2.0, (gamma + p.phi) / 2.0);
    p.omega_minus = cplx((wsum - p.theta) / 2.0, (gamma - p.phi) / 2.0);

    if (atom.q) {
        const double q = (atom.q->q1 * g1 + atom.q->q2 * g2) / gamma;
        p.q_eff = q;
        p.background = 1.0 / cplx(q, 1.0);
        p.background_conj = 1.0 / cplx(q, -1.0);
        p.background_sq = 1.0 / (q * q + 1.0);
        p.k_coef = cplx(atom.q->q2 * g2 - atom.q->q1 * g1, g2 - g1) / (gamma * cplx(q, 1.0));
    } else {
        p.k_coef = cplx((g2 - g1) / gamma, 0.0);
    }

    const cplx root(p.theta, p.phi);
    if (std::abs(root) <= 1e-15 * gamma) {
        std::ostringstream msg;
        msg << "exceptional point (theta = phi = 0 at omega21 = " << w21
            << ", gamma1 = gamma2): amplitudes A+- are undefined";
        throw ParameterError(msg.str());
    }
    const cplx ratio = (w21 * p.k_coef + kI * gamma) / root;
    p.a_plus = gamma / 2.0 * (1.0 + ratio);
    p.a_minus = gamma / 2.0 * (1.0 - ratio);
    p.minus_branch_active = std::abs(p.a_minus) > kMinusBranchGuard * gamma;

    // The middle term pairs each amplitude with its partner's conjugate: these
    // are the residues of ∫S dω, so that c = 4∫S dω when q is infinite.
    p.b_plus = 2.0 * p.a_plus *
               (std::conj(p.a_plus) / (kI * (gamma + p.phi)) +
                std::conj(p.a_minus) / (kI * gamma + p.theta) + p.background_conj);
    if (p.minus_branch_active) {
        if (std::abs(gamma - p.phi) <= 1e-14 * gamma) {
            std::ostringstream msg;
            msg << "omega- = " << p.omega_minus.real()
                << " lies on the real axis with nonzero weight |A-| = " << std::abs(p.a_minus)
                << "; a zero autoionization width with omega21 != 0 is not supported";
            throw ParameterError(msg.str());
        }
        p.b_minus = 2.0 * p.a_minus *
                    (std::conj(p.a_minus) / (kI * (gamma - p.phi)) +
                     std::conj(p.a_plus) / (kI * gamma - p.theta) + p.background_conj);
    }
    p.c_coef = (kI * p.b_plus + kI * p.b_minus) / gamma;
    return p;
}

cplx rabi_coupling(double omega, const DerivedParams& derived)
{
    cplx bracket = derived.a_plus / (omega - derived.omega_plus) + derived.background;
    if (derived.minus_branch_active)
        bracket += derived.a_minus / (omega - derived.omega_minus);
    return bracket / std::sqrt(4.0 * std::numbers::pi * derived.gamma_total);
}

double form_factor(double omega, const DerivedParams& derived)
{
    return std::norm(rabi_coupling(omega, derived));
}

} // namespace dfano
