#include "dfano/spectrum.hpp"

#include <cmath>
#include <stdexcept>

namespace dfano
{
void check_spectrum(const Spectrum& spectrum)
{
    if (spectrum.omegas.size() != spectrum.values.size())
        throw std::invalid_argument("spectrum grid and values differ in length");
    for (std::size_t i = 1; i < spectrum.omegas.size(); ++i)
        if (!(spectrum.omegas[i] > spectrum.omegas[i - 1]))
            throw std::invalid_argument("spectrum grid must be strictly increasing");
    for (double v : spectrum.values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("spectrum values must be finite and nonnegative");
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n)
{
    if (n < 2 || !(hi > lo))
        throw std::invalid_argument("uniform grid needs n >= 2 and hi > lo");
    std::vector<double> x(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = lo + h * static_cast<double>(i);
    x.back() = hi;
    return x;
}

double integrate_trapezoid(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("trapezoid: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

} // namespace dfano
