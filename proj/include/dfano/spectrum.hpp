#ifndef DFANO_SPECTRUM_HPP
#define DFANO_SPECTRUM_HPP

#include "dfano/dressed_continuum.hpp"

#include <string>
#include <vector>

namespace dfano
{
// Where a spectrum came from: the inputs and the method tag
// ("analytic" or "oracle").
struct Provenance
{
    AtomParams atom;
    FieldParams field;
    std::string method;
};

// Sampled long-time photoelectron spectrum W(ω) on an ascending grid.
struct Spectrum
{
    std::vector<double> omegas;
    std::vector<double> values;
    Provenance provenance;

    std::size_t size() const { return omegas.size(); }
};

// Throws std::invalid_argument when sizes differ, the grid is not strictly
// increasing, or a value is negative / not finite.
void check_spectrum(const Spectrum& spectrum);

// Uniform grid of n points on [lo, hi], endpoints included.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

// Trapezoid integral of the sampled values.
double integrate_trapezoid(const std::vector<double>& x, const std::vector<double>& y);

} // namespace dfano

#endif
