#include "dfano/experiments.hpp"

#include "dfano/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dfano
{
std::string to_string(SweptParameter p)
{
    return p == SweptParameter::B ? "b" : "a0";
}

std::string to_string(Method m)
{
    return m == Method::Analytic ? "analytic" : "oracle";
}

std::string to_string(Trend t)
{
    switch (t) {
    case Trend::Increasing:
        return "increasing";
    case Trend::Decreasing:
        return "decreasing";
    case Trend::NonMonotone:
        return "non-monotone";
    case Trend::Undetermined:
        break;
    }
    return "undetermined";
}

void validate(const SweepSpec& spec)
{
    validate(spec.base_atom);
    validate(spec.base_field);
    if (spec.values.empty())
        throw ParameterError("sweep needs at least one value");
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        if (!std::isfinite(spec.values[i]) || spec.values[i] < 0.0)
            throw ParameterError("sweep values must be finite and nonnegative");
        if (i > 0 && spec.values[i] <= spec.values[i - 1])
            throw ParameterError("sweep values must be strictly ascending");
    }
    if (spec.methods.empty())
        throw ParameterError("sweep needs at least one method");
    if (spec.grid.n_points < 2 || !(spec.grid.omega_max > spec.grid.omega_min))
        throw ParameterError("sweep grid needs n_points >= 2 and omega_max > omega_min");
}

FieldParams with_value(const FieldParams& base, SweptParameter p, double value)
{
    FieldParams f = base;
    if (p == SweptParameter::B)
        f.b = value;
    else
        f.a0 = value;
    return f;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned max_workers)
{
    validate(spec);
    const auto grid = spec.grid.points();
    const std::size_t m = spec.methods.size();

    SweepResult result;
    result.cells.resize(spec.values.size() * m);
    for (std::size_t v = 0; v < spec.values.size(); ++v)
        for (std::size_t k = 0; k < m; ++k) {
            result.cells[v * m + k].value = spec.values[v];
            result.cells[v * m + k].method = spec.methods[k];
        }

    // Every cell catches its own failure, so parallel_for never sees one.
    detail::parallel_for(
        result.cells.size(),
        [&](std::size_t i) {
            SweepCell& cell = result.cells[i];
            try {
                const FieldParams field = with_value(spec.base_field, spec.swept, cell.value);
                if (cell.method == Method::Analytic) {
                    cell.spectrum = spectrum_analytic(spec.base_atom, field, grid, spec.closed_form);
                } else {
                    const auto run = run_oracle(spec.base_atom, field, spec.oracle);
                    cell.spectrum = resample(run.spectrum, grid);
                }
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        },
        max_workers);
    return result;
}

bool SpectrumDiagnostics::any_wedge() const
{
    return std::ranges::any_of(peaks, [](const Peak& p) { return p.wedge; });
}

namespace
{
double second_difference(const std::vector<double>& w, std::size_t i)
{
    return std::abs(w[i - 1] - 2.0 * w[i] + w[i + 1]);
}

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const std::size_t mid = v.size() / 2;
    std::ranges::nth_element(v, v.begin() + static_cast<std::ptrdiff_t>(mid));
    const double upper = v[mid];
    if (v.size() % 2)
        return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

// Indices of strict local maxima; a plateau counts once, at its left edge.
std::vector<std::size_t> local_maxima(const std::vector<double>& w)
{
    std::vector<std::size_t> out;
    const std::size_t n = w.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (w[i] > w[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && w[j + 1] == w[i])
                ++j;
            if (j + 1 < n && w[j + 1] < w[i])
                out.push_back(i);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<std::size_t> local_minima(const std::vector<double>& w)
{
    std::vector<double> neg(w.size());
    std::ranges::transform(w, neg.begin(), [](double x) { return -x; });
    return local_maxima(neg);
}

// Topographic prominence: height above the higher of the two lowest points
// reached before climbing above the peak on either side.
double prominence(const std::vector<double>& w, std::size_t i)
{
    double left = w[i];
    for (std::size_t k = i; k-- > 0;) {
        if (w[k] > w[i])
            break;
        left = std::min(left, w[k]);
    }
    double right = w[i];
    for (std::size_t k = i + 1; k < w.size(); ++k) {
        if (w[k] > w[i])
            break;
        right = std::min(right, w[k]);
    }
    return w[i] - std::max(left, right);
}

double half_max_width(const std::vector<double>& x, const std::vector<double>& w, std::size_t i)
{
    const double half = 0.5 * w[i];
    double lo = x.front();
    for (std::size_t k = i; k > 0; --k) {
        if (w[k - 1] < half) {
            lo = x[k - 1] + (half - w[k - 1]) / (w[k] - w[k - 1]) * (x[k] - x[k - 1]);
            break;
        }
    }
    double hi = x.back();
    for (std::size_t k = i; k + 1 < w.size(); ++k) {
        if (w[k + 1] < half) {
            hi = x[k] + (w[k] - half) / (w[k] - w[k + 1]) * (x[k + 1] - x[k]);
            break;
        }
    }
    return hi - lo;
}

bool is_wedge(const std::vector<double>& w, std::size_t i, const DiagnoseOptions& opt)
{
    const double spike = second_difference(w, i);
    std::vector<double> flanks;
    for (std::size_t k = 2; k < 2 + opt.flank_points; ++k) {
        if (i >= k + 1)
            flanks.push_back(second_difference(w, i - k));
        if (i + k + 1 < w.size())
            flanks.push_back(second_difference(w, i + k));
    }
    if (flanks.empty())
        return false;
    const double ref = median(std::move(flanks));
    return spike > opt.wedge_ratio * ref && spike > 0.0;
}
} // namespace

SpectrumDiagnostics diagnose(const Spectrum& spectrum, const DiagnoseOptions& options)
{
    check_spectrum(spectrum);
    const auto& x = spectrum.omegas;
    const auto& w = spectrum.values;

    SpectrumDiagnostics out;
    out.total_weight = integrate_trapezoid(x, w);
    if (w.empty())
        return out;

    const auto gmax_it = std::ranges::max_element(w);
    const double gmax = *gmax_it;
    if (gmax <= 0.0)
        return out;
    const auto gi = static_cast<std::size_t>(gmax_it - w.begin());

    const double floor = options.prominence_fraction * gmax;
    std::vector<Peak> candidates;
    for (std::size_t i : local_maxima(w)) {
        const double prom = prominence(w, i);
        if (prom < floor)
            continue;
        Peak p;
        p.index = i;
        p.location = x[i];
        p.height = w[i];
        p.prominence = prom;
        p.width = half_max_width(x, w, i);
        p.wedge = is_wedge(w, i, options);
        candidates.push_back(p);
    }
    // Enforce the minimum separation by keeping the taller of any close pair.
    std::ranges::sort(candidates, [](const Peak& a, const Peak& b) { return a.height > b.height; });
    for (const Peak& c : candidates) {
        const bool close = std::ranges::any_of(out.peaks, [&](const Peak& kept) {
            const std::size_t gap = c.index > kept.index ? c.index - kept.index : kept.index - c.index;
            return gap < options.min_separation;
        });
        if (!close)
            out.peaks.push_back(c);
    }
    std::ranges::sort(out.peaks, {}, &Peak::index);

    for (std::size_t i : local_minima(w))
        out.minima.push_back(Minimum{i, x[i], w[i]});

    if (out.total_weight > 0.0) {
        const std::vector<double> xl(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(gi) + 1);
        const std::vector<double> wl(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(gi) + 1);
        const std::vector<double> xr(x.begin() + static_cast<std::ptrdiff_t>(gi), x.end());
        const std::vector<double> wr(w.begin() + static_cast<std::ptrdiff_t>(gi), w.end());
        out.asymmetry = std::abs(integrate_trapezoid(xl, wl) - integrate_trapezoid(xr, wr)) /
                        out.total_weight;
    }
    return out;
}

std::optional<Minimum> minimum_between(const Spectrum& spectrum, double lo, double hi)
{
    std::optional<Minimum> best;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double x = spectrum.omegas[i];
        if (x < lo || x > hi)
            continue;
        if (!best || spectrum.values[i] < best->value)
            best = Minimum{i, x, spectrum.values[i]};
    }
    return best;
}

Comparison compare(const Spectrum& analytic, const Spectrum& oracle)
{
    check_spectrum(analytic);
    check_spectrum(oracle);
    if (analytic.omegas != oracle.omegas)
        throw std::invalid_argument("compare: spectra are sampled on different grids");
    const auto& x = analytic.omegas;

    Comparison c;
    c.analytic_integral = integrate_trapezoid(x, analytic.values);
    c.oracle_integral = integrate_trapezoid(x, oracle.values);
    if (!(c.analytic_integral > 0.0) || !(c.oracle_integral > 0.0))
        throw std::invalid_argument("compare: a spectrum has no weight to normalise");

    const std::size_t n = x.size();
    std::vector<double> diff2(n), a2(n), o2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = analytic.values[i] / c.analytic_integral;
        const double o = oracle.values[i] / c.oracle_integral;
        diff2[i] = (a - o) * (a - o);
        a2[i] = a * a;
        o2[i] = o * o;
        c.max_deviation = std::max(c.max_deviation, std::abs(a - o));
    }
    const double scale =
        0.5 * (std::sqrt(integrate_trapezoid(x, a2)) + std::sqrt(integrate_trapezoid(x, o2)));
    c.l2_distance = std::sqrt(integrate_trapezoid(x, diff2)) / scale;
    return c;
}

Spectrum resample(const Spectrum& spectrum, const std::vector<double>& grid)
{
    check_spectrum(spectrum);
    Spectrum out;
    out.omegas = grid;
    out.values.assign(grid.size(), 0.0);
    out.provenance = spectrum.provenance;
    const auto& x = spectrum.omegas;
    const auto& w = spectrum.values;
    if (x.size() < 2)
        return out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = grid[i];
        if (g < x.front() || g > x.back())
            continue;
        auto it = std::ranges::upper_bound(x, g);
        std::size_t hi = static_cast<std::size_t>(it - x.begin());
        if (hi == x.size())
            hi = x.size() - 1;
        const std::size_t lo = hi - 1;
        const double t = (g - x[lo]) / (x[hi] - x[lo]);
        out.values[i] = (1.0 - t) * w[lo] + t * w[hi];
    }
    return out;
}

Trend classify(const std::vector<double>& heights)
{
    if (heights.size() < 2)
        return Trend::Undetermined;
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < heights.size(); ++i) {
        up = up && heights[i] > heights[i - 1];
        down = down && heights[i] < heights[i - 1];
    }
    if (up)
        return Trend::Increasing;
    if (down)
        return Trend::Decreasing;
    return Trend::NonMonotone;
}

TrendReport trend_check(const std::vector<double>& values,
                        const std::vector<SpectrumDiagnostics>& diagnostics)
{
    if (values.size() != diagnostics.size())
        throw std::invalid_argument("trend_check: one diagnostics record per sweep value expected");
    if (values.size() < 3)
        throw std::invalid_argument("trend_check: at least three sweep values are needed");

    TrendReport report;
    std::vector<std::size_t> live; // indices into report.tracks still being extended
    for (const Peak& p : diagnostics.front().peaks) {
        report.tracks.push_back(PeakTrack{{0}, {p.location}, {p.height}, Trend::Undetermined});
        live.push_back(report.tracks.size() - 1);
    }

    for (std::size_t s = 1; s < diagnostics.size(); ++s) {
        const auto& peaks = diagnostics[s].peaks;
        if (peaks.size() != diagnostics[s - 1].peaks.size())
            report.transitions.push_back(s);

        // Greedy one-to-one matching by distance between track ends and peaks.
        struct Pair
        {
            double dist;
            std::size_t track;
            std::size_t peak;
        };
        std::vector<Pair> pairs;
        for (std::size_t t : live)
            for (std::size_t k = 0; k < peaks.size(); ++k)
                pairs.push_back({std::abs(report.tracks[t].locations.back() - peaks[k].location), t, k});
        std::ranges::stable_sort(pairs, {}, &Pair::dist);

        std::vector<bool> track_used(report.tracks.size(), false);
        std::vector<bool> peak_used(peaks.size(), false);
        std::vector<std::size_t> next_live;
        for (const Pair& pr : pairs) {
            if (track_used[pr.track] || peak_used[pr.peak])
                continue;
            track_used[pr.track] = true;
            peak_used[pr.peak] = true;
            auto& tr = report.tracks[pr.track];
            tr.sweep_index.push_back(s);
            tr.locations.push_back(peaks[pr.peak].location);
            tr.heights.push_back(peaks[pr.peak].height);
            next_live.push_back(pr.track);
        }
        for (std::size_t k = 0; k < peaks.size(); ++k) {
            if (peak_used[k])
                continue;
            report.tracks.push_back(PeakTrack{{s}, {peaks[k].location}, {peaks[k].height}, Trend::Undetermined});
            next_live.push_back(report.tracks.size() - 1);
        }
        live = std::move(next_live);
    }

    for (auto& tr : report.tracks)
        tr.trend = classify(tr.heights);
    std::ranges::stable_sort(report.tracks, [](const PeakTrack& a, const PeakTrack& b) {
        if (a.sweep_index.front() != b.sweep_index.front())
            return a.sweep_index.front() < b.sweep_index.front();
        return a.locations.front() < b.locations.front();
    });
    return report;
}

} // namespace dfano
