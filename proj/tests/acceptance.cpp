// Acceptance runner. Each criterion prints one "[PASS]" or "[FAIL]" line with
// the measured value against its tolerance; indented lines below it are
// supporting detail. Exit status is 0 only when every selected criterion passes.
//
//   acceptance               all criteria
//   acceptance --criterion N one criterion

#include "dfano/config.hpp"
#include "dfano/continuum_oracle.hpp"
#include "dfano/dressed_continuum.hpp"
#include "dfano/experiments.hpp"
#include "dfano/presets.hpp"
#include "dfano/spectral_engine.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace dfano;

namespace
{
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int n, bool pass, const std::string& what)
{
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", n, what.c_str());
    std::fflush(stdout);
    return pass;
}

void detail(const std::string& line)
{
    std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// One oracle run with the default settings (or the given overrides), kept
// even when it has not converged so that the caller can say so.
struct OracleOutcome
{
    ContinuumGrid grid;
    OracleTrajectory trajectory;
    OracleSettings settings;
    double seconds = 0.0;

    // Spectrum of the last checkpoint on the oracle's own grid, limited to
    // [lo, hi]. Diagnostics run on native points: linear resampling would put
    // a kink at every node and confuse the wedge test.
    Spectrum native(double lo, double hi) const
    {
        Spectrum s;
        const auto& w = trajectory.checkpoints.back().spectrum;
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (grid.points[k] >= lo && grid.points[k] <= hi) {
                s.omegas.push_back(grid.points[k]);
                s.values.push_back(std::max(w[k], 0.0));
            }
        s.provenance = {trajectory.atom, trajectory.field, "oracle"};
        return s;
    }

    std::string summary() const
    {
        const auto& last = trajectory.checkpoints.back();
        return fmt("oracle N=%zu window [%g, %g] dt=%.4g stop t=%g p0=%.3g change=%.3g %s (%.0f s)",
                   grid.size(), grid.omega_min, grid.omega_max, trajectory.dt, last.t, last.p0,
                   last.spectrum_change, trajectory.converged ? "converged" : "NOT converged", seconds);
    }
};

OracleOutcome oracle(const AtomParams& atom, const FieldParams& field, OracleSettings partial = {},
                     bool stop_on_convergence = true)
{
    const auto t0 = Clock::now();
    OracleOutcome out;
    out.settings = resolve_oracle_settings(atom, field, partial);
    out.grid = build_grid(out.settings.window->lo, out.settings.window->hi, out.settings.n_points,
                          derive_params(atom));
    IntegrationOptions opt;
    opt.checkpoint_interval = *out.settings.checkpoint_interval;
    opt.stop_on_convergence = stop_on_convergence;
    out.trajectory = integrate(atom, field, out.grid, *out.settings.t_final, *out.settings.dt, opt);
    out.seconds = seconds_since(t0);
    return out;
}

std::string describe(const SpectrumDiagnostics& d)
{
    std::string s = fmt("%zu peak(s)", d.peaks.size());
    for (const auto& p : d.peaks)
        s += fmt(" [at %.3f h=%.4g prom=%.3g%s]", p.location, p.height, p.prominence, p.wedge ? " wedge" : "");
    s += fmt(", asymmetry %.4f", d.asymmetry);
    return s;
}

// The closed-form chain is trusted for the physics criteria only when its
// conjugation self-check holds on the degenerate preset.
constexpr double kConjugationTol = 1e-6;

double conjugation_mismatch_fig2()
{
    const RunConfig c = load_preset("fig2");
    return analytic_diagnostics(c.atom, c.field, c.grid.points(), c.closed_form).max_conjugation_mismatch;
}

std::string method_note()
{
    const double m = conjugation_mismatch_fig2();
    if (m > kConjugationTol)
        return fmt("judged on the oracle: the closed-form conjugation check fails (%.3g > %g)", m, kConjugationTol);
    return "judged on the oracle; closed-form conjugation check holds";
}

// What the closed forms say for the same run; printed for comparison only.
void analytic_detail(const std::string& label, const RunConfig& c, const FieldParams& field)
{
    try {
        const Spectrum a = spectrum_analytic(c.atom, field, c.grid.points(), c.closed_form);
        detail(label + " closed form (not judged): " + describe(diagnose(a)));
    } catch (const std::exception& e) {
        detail(label + " closed form (not judged): " + e.what());
    }
}

// 1 ------------------------------------------------------------------------
bool criterion_1()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> w(-5.0, 5.0), g(0.01, 5.0), q(-100.0, 100.0);
    double worst_sum = 0.0, worst_a = 0.0, worst_deg = 0.0;
    for (int i = 0; i < 1000; ++i) {
        AtomParams a{w(rng), w(rng), g(rng), g(rng), std::nullopt};
        if ((a.omega2 - a.omega1) * (a.gamma2 - a.gamma1) < 0.0)
            std::swap(a.gamma1, a.gamma2);
        if (i % 2)
            a.q = AsymmetryParams{q(rng), q(rng)};
        const auto d = derive_params(a);
        const double gamma = a.gamma1 + a.gamma2;
        const cplx expect{a.omega1 + a.omega2, gamma};
        worst_sum = std::max(worst_sum, std::abs(d.omega_plus + d.omega_minus - expect) / std::abs(expect));
        worst_a = std::max(worst_a, std::abs(d.a_plus + d.a_minus - gamma) / gamma);
    }
    for (int i = 0; i < 1000; ++i) {
        const double w0 = w(rng);
        AtomParams a{w0, w0, g(rng), g(rng), std::nullopt};
        if (i % 2)
            a.q = AsymmetryParams{q(rng), q(rng)};
        const double gamma = a.gamma1 + a.gamma2;
        const auto d = derive_params(a);
        worst_deg = std::max({worst_deg, std::abs(d.theta), std::abs(d.phi - gamma) / gamma,
                              std::abs(d.a_minus) / gamma});
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_sum < 1e-12 && worst_a < 1e-12 && worst_deg < 1e-12 && elapsed < 1.0;
    return report(1, pass,
                  fmt("structural identities: pole sum %.2e, A sum %.2e, degenerate %.2e (tol 1e-12); "
                      "runtime %.3f s (tol 1 s)",
                      worst_sum, worst_a, worst_deg, elapsed));
}

// 2 ------------------------------------------------------------------------
bool criterion_2()
{
    double worst = 0.0, slowest = 0.0;
    for (const char* name : {"fig2", "fig4", "fig8"}) {
        const RunConfig c = load_preset(name);
        OracleSettings s;
        s.n_points = 401;
        const OracleOutcome o = oracle(c.atom, c.field, s);
        detail(fmt("%s: drift %.3g over %zu steps; ", name, o.trajectory.max_conservation_drift,
                   o.trajectory.steps) +
               o.summary());
        worst = std::max(worst, o.trajectory.max_conservation_drift);
        slowest = std::max(slowest, o.seconds);
    }
    return report(2, worst < 1e-6,
                  fmt("oracle conservation on fig2/fig4/fig8, N=401: max |p0 + sum w S e - 1| = %.3g "
                      "(tol 1e-6); slowest preset %.0f s (target 300 s)",
                      worst, slowest));
}

// 3 ------------------------------------------------------------------------
bool criterion_3()
{
    bool exact = true;
    for (const char* name : {"fig2", "fig4", "fig6", "fig8"}) {
        const RunConfig c = load_preset(name);
        const FieldParams null{c.field.omega_laser, 0.0, 0.0};
        const Spectrum a = spectrum_analytic(c.atom, null, c.grid.points(), c.closed_form);
        const bool a_zero = std::ranges::all_of(a.values, [](double v) { return v == 0.0; });

        OracleSettings s;
        s.n_points = 101;
        s.t_final = 40.0;
        s.checkpoint_interval = 10.0;
        const OracleOutcome o = oracle(c.atom, null, s, false);
        bool o_zero = o.trajectory.p0_min == 1.0 && o.trajectory.p0_max == 1.0;
        for (const auto& cp : o.trajectory.checkpoints)
            o_zero = o_zero && cp.p0 == 1.0 &&
                     std::ranges::all_of(cp.spectrum, [](double v) { return v == 0.0; });
        detail(fmt("%s: analytic W == 0 %s, oracle p0 == 1 and W == 0 over %zu steps %s", name,
                   a_zero ? "yes" : "NO", o.trajectory.steps, o_zero ? "yes" : "NO"));
        exact = exact && a_zero && o_zero;
    }
    return report(3, exact, std::string("null field (b = a0 = 0): W identically 0 on both paths and p0(t) == 1 ") +
                                (exact ? "exactly" : "VIOLATED"));
}

// 4 ------------------------------------------------------------------------
// Analytic spectrum evaluated on the oracle's own nodes inside [lo, hi], so
// that neither side is interpolated.
double l2_against(const RunConfig& c, const FieldParams& field, const ClosedFormOptions& opt, const OracleOutcome& o)
{
    const Spectrum ref = o.native(c.grid.omega_min, c.grid.omega_max);
    return compare(spectrum_analytic(c.atom, field, ref.omegas, opt), ref).l2_distance;
}

bool criterion_4()
{
    const RunConfig c = load_preset("fig2");
    const double tol = 0.05;

    // Convergence of the reference: doubled grid and halved step at a0 = 0.05.
    FieldParams f05 = c.field;
    f05.a0 = 0.05;
    OracleSettings base;
    base.n_points = 401;
    const OracleOutcome coarse = oracle(c.atom, f05, base);
    OracleSettings fine = coarse.settings;
    fine.n_points = 801;
    fine.dt.reset();
    const OracleOutcome dense = oracle(c.atom, f05, fine);
    OracleSettings half = coarse.settings;
    half.dt = *coarse.settings.dt / 2.0;
    const OracleOutcome halfstep = oracle(c.atom, f05, half);
    // Every coarse node is also a node of the doubled grid.
    const Spectrum coarse_s = coarse.native(c.grid.omega_min, c.grid.omega_max);
    const double grid_l2 = compare(coarse_s, resample(dense.native(-1e300, 1e300), coarse_s.omegas)).l2_distance;
    const double step_l2 = compare(coarse_s, halfstep.native(c.grid.omega_min, c.grid.omega_max)).l2_distance;
    const bool converged = coarse.trajectory.converged && dense.trajectory.converged &&
                           halfstep.trajectory.converged && grid_l2 < 0.1 * tol && step_l2 < 0.1 * tol;
    detail(fmt("reference convergence at a0=0.05: N 401->801 L2 %.3g, dt -> dt/2 L2 %.3g (need < %g)", grid_l2,
               step_l2, 0.1 * tol));
    detail("  " + coarse.summary());
    detail("  " + dense.summary());
    detail("  " + halfstep.summary());

    bool pass = converged;
    std::vector<std::pair<double, OracleOutcome>> refs{{0.05, coarse}};
    FieldParams f2 = c.field;
    f2.a0 = 0.2;
    refs.emplace_back(0.2, oracle(c.atom, f2, base));
    double worst = 0.0;
    for (const auto& [a0, o] : refs) {
        FieldParams f = c.field;
        f.a0 = a0;
        const double l2 = o.trajectory.converged ? l2_against(c, f, c.closed_form, o) : INFINITY;
        detail(fmt("a0=%g: analytic vs oracle L2 = %.4f; ", a0, l2) + o.summary());
        worst = std::max(worst, l2);
        pass = pass && l2 < tol;
    }

    if (worst >= tol) {
        // Formula-discrepancy report, diagnostics in the prescribed order.
        const auto diag = analytic_diagnostics(c.atom, f05, c.grid.points(), c.closed_form);
        const bool conj_fail = diag.max_conjugation_mismatch > kConjugationTol;
        detail("formula-discrepancy report (printed closed forms vs oracle):");
        detail(fmt("  conjugation check: max |D- - conj(D+)|/|D+| = %.3g (tol %g) -> %s",
                   diag.max_conjugation_mismatch, kConjugationTol, conj_fail ? "FAILS" : "ok"));
        struct Knob
        {
            std::string label;
            std::function<void(ClosedFormOptions&)> set;
        };
        const std::vector<std::pair<std::string, std::vector<Knob>>> groups{
            {"factor-4 knob",
             {{"noise_factor=1", [](auto& o) { o.noise_factor = 1.0; }},
              {"noise_factor=2", [](auto& o) { o.noise_factor = 2.0; }},
              {"noise_factor=8", [](auto& o) { o.noise_factor = 8.0; }}}},
            {"H- argument",
             {{"h_minus=minus_i_omega", [](auto& o) { o.h_minus_argument = HMinusArgument::LiteralMinusI; }},
              {"h_minus=laser", [](auto& o) { o.h_minus_argument = HMinusArgument::LaserFrequency; }},
              {"d_minus=literal", [](auto& o) { o.d_minus_variant = DMinusVariant::Literal; }}}},
        };
        std::string first = conj_fail ? "conjugation check" : "";
        for (const auto& [group, knobs] : groups) {
            bool rescues = false;
            for (const auto& k : knobs) {
                ClosedFormOptions opt = c.closed_form;
                k.set(opt);
                std::string line = "  " + group + " " + k.label + ":";
                for (const auto& [a0, o] : refs) {
                    FieldParams f = c.field;
                    f.a0 = a0;
                    try {
                        const double l2 = l2_against(c, f, opt, o);
                        line += fmt(" a0=%g L2 %.4f", a0, l2);
                        rescues = rescues || l2 < tol;
                    } catch (const std::exception& e) {
                        line += fmt(" a0=%g error (%s)", a0, e.what());
                    }
                }
                detail(line);
            }
            detail("  " + group + (rescues ? ": an alternative setting brings L2 under tolerance"
                                           : ": no alternative setting brings L2 under tolerance"));
            if (first.empty() && !rescues)
                first = group;
        }
        detail("  first failing diagnostic: " + (first.empty() ? std::string("none identified") : first));
        detail("  acceptance for criteria 5-8 transfers to the oracle");
    }
    return report(4, pass,
                  fmt("analytic vs oracle on fig2 (a0 in {0.05, 0.2}): worst L2 %.4f (tol %g); reference %s",
                      worst, tol, converged ? "converged" : "NOT converged"));
}

// 5 ------------------------------------------------------------------------
bool criterion_5()
{
    const RunConfig c = load_preset("fig2");
    detail(method_note());
    std::size_t peaks_small = 0, peaks_large = 0;
    bool converged = true;
    for (double a0 : {0.001, 0.5}) {
        const FieldParams f{c.field.omega_laser, 0.5, a0};
        const OracleOutcome o = oracle(c.atom, f);
        const auto d = diagnose(o.native(c.grid.omega_min, c.grid.omega_max));
        detail(fmt("a0=%g: ", a0) + describe(d) + "; " + o.summary());
        analytic_detail(fmt("  a0=%g", a0), c, f);
        converged = converged && o.trajectory.converged;
        (a0 < 0.01 ? peaks_small : peaks_large) = d.peaks.size();
    }
    const bool pass = converged && peaks_small == 2 && peaks_large < 2;
    return report(5, pass,
                  fmt("Autler-Townes on fig2 atom, b=0.5: a0=0.001 -> %zu peak(s) (need 2), a0=0.5 -> %zu (need < 2)%s",
                      peaks_small, peaks_large, converged ? "" : "; a reference run did not converge"));
}

// 6 ------------------------------------------------------------------------
bool criterion_6()
{
    const RunConfig c = load_preset("fig4");
    detail(method_note());
    bool two_everywhere = true, converged = true;
    std::vector<double> left, right;
    SpectrumDiagnostics at_b05;
    for (double b : {0.1, 0.3, 0.5}) {
        const OracleOutcome o = oracle(c.atom, FieldParams{c.field.omega_laser, b, 0.4});
        const auto d = diagnose(o.native(c.grid.omega_min, c.grid.omega_max));
        detail(fmt("b=%g a0=0.4: ", b) + describe(d) + "; " + o.summary());
        analytic_detail(fmt("  b=%g", b), c, FieldParams{c.field.omega_laser, b, 0.4});
        converged = converged && o.trajectory.converged;
        two_everywhere = two_everywhere && d.peaks.size() == 2;
        if (d.peaks.size() == 2) {
            left.push_back(d.peaks[0].height);
            right.push_back(d.peaks[1].height);
        }
        if (b == 0.5)
            at_b05 = d;
    }
    const OracleOutcome o1 = oracle(c.atom, FieldParams{c.field.omega_laser, 0.5, 0.1});
    const auto d1 = diagnose(o1.native(c.grid.omega_min, c.grid.omega_max));
    detail("b=0.5 a0=0.1: " + describe(d1) + "; " + o1.summary());
    converged = converged && o1.trajectory.converged;
    two_everywhere = two_everywhere && d1.peaks.size() == 2;

    double right_spread = INFINITY;
    bool left_up = false, left_down_a0 = false;
    if (two_everywhere) {
        const auto [lo, hi] = std::ranges::minmax(right);
        right_spread = (hi - lo) / hi;
        left_up = classify(left) == Trend::Increasing;
        left_down_a0 = d1.peaks[0].height > at_b05.peaks[0].height;
        detail(fmt("left-peak heights vs b: %.4g %.4g %.4g (relative span %.3g)", left[0], left[1], left[2],
                   (left[2] - left[0]) / left[2]));
    }
    const bool pass = converged && two_everywhere && right_spread < 0.15 && left_up && left_down_a0;
    return report(6, pass,
                  fmt("fig4 two-peak structure: 2 peaks every run %s; right-peak variation %.3f (tol 0.15); "
                      "left peak increasing in b %s, decreasing in a0 %s",
                      two_everywhere ? "yes" : "NO", right_spread, left_up ? "yes" : "NO",
                      left_down_a0 ? "yes" : "NO"));
}

// 7 ------------------------------------------------------------------------
bool criterion_7()
{
    const RunConfig c6 = load_preset("fig6");
    const RunConfig c7 = load_preset("fig7");
    detail(method_note());
    const std::vector<double> bs{0.1, 0.5, 1.0};
    std::vector<bool> wedge6;
    std::vector<double> height6;
    SpectrumDiagnostics smallest;
    bool converged = true;
    for (double b : bs) {
        const OracleOutcome o = oracle(c6.atom, FieldParams{c6.field.omega_laser, b, 0.0});
        const auto d = diagnose(o.native(c6.grid.omega_min, c6.grid.omega_max));
        detail(fmt("fig6 b=%g: ", b) + describe(d) + "; " + o.summary());
        analytic_detail(fmt("  fig6 b=%g", b), c6, FieldParams{c6.field.omega_laser, b, 0.0});
        converged = converged && o.trajectory.converged;
        wedge6.push_back(d.any_wedge());
        height6.push_back(d.peaks.empty() ? 0.0 : std::ranges::max(d.peaks, {}, &Peak::height).height);
        if (b == bs.front())
            smallest = d;
    }
    // Some b* in the scan with the wedge firing for every b >= b*.
    std::optional<double> b_star;
    for (std::size_t i = bs.size(); i-- > 0 && wedge6[i];)
        b_star = bs[i];
    const bool small_ok = smallest.peaks.size() == 1 && !smallest.any_wedge() && smallest.asymmetry < 0.05;

    bool fig7_ok = true;
    double worst_asym = 0.0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        const OracleOutcome o = oracle(c7.atom, FieldParams{c7.field.omega_laser, bs[i], 0.5});
        const auto d = diagnose(o.native(c7.grid.omega_min, c7.grid.omega_max));
        detail(fmt("fig7 b=%g: ", bs[i]) + describe(d) + "; " + o.summary());
        analytic_detail(fmt("  fig7 b=%g", bs[i]), c7, FieldParams{c7.field.omega_laser, bs[i], 0.5});
        converged = converged && o.trajectory.converged;
        const double h = d.peaks.empty() ? 0.0 : std::ranges::max(d.peaks, {}, &Peak::height).height;
        worst_asym = std::max(worst_asym, d.asymmetry);
        fig7_ok = fig7_ok && !d.any_wedge() && d.asymmetry < 0.05 && h < height6[i];
    }
    const bool pass = converged && b_star && small_ok && fig7_ok;
    std::string b_star_text = b_star ? fmt("b*=%g", *b_star) : std::string("no b* (wedge not firing at the top of the scan)");
    return report(7, pass,
                  fmt("fig6 wedge: %s; smallest b single symmetric wedge-free peak %s. fig7: no wedge, "
                      "asymmetry %.4f (tol 0.05), lower than fig6 %s%s",
                      b_star_text.c_str(), small_ok ? "yes" : "NO", worst_asym, fig7_ok ? "yes" : "NO",
                      converged ? "" : "; a run did not converge"));
}

// 8 ------------------------------------------------------------------------
bool criterion_8()
{
    const RunConfig c = load_preset("fig8");
    detail(method_note());
    const auto derived = derive_params(c.atom);
    const double lo = std::min(derived.omega_minus.real(), derived.omega_plus.real());
    const double hi = std::max(derived.omega_minus.real(), derived.omega_plus.real());
    // The default window spans hundreds of units for this atom (the wide
    // resonance) and leaves a grid far too coarse for the narrow one, so a
    // tighter window around both is used.
    OracleSettings s;
    s.window = Window{-10.0, 15.0};
    s.n_points = 401;
    double ratio_noise = 0.0, min_noise = 0.0, min_clean = 0.0;
    bool converged = true;
    for (double a0 : {0.5, 0.0}) {
        const OracleOutcome o = oracle(c.atom, FieldParams{c.field.omega_laser, c.field.b, a0}, s);
        const Spectrum sp = o.native(c.grid.omega_min, c.grid.omega_max);
        const auto m = minimum_between(sp, lo, hi);
        const double top = std::ranges::max(sp.values);
        detail(fmt("a0=%g: min W on [%.4f, %.4f] = %.4g at %.4f, max W = %.4g; ", a0, lo, hi, m->value, m->location,
                   top) +
               o.summary());
        const FieldParams f{c.field.omega_laser, c.field.b, a0};
        const Spectrum a = spectrum_analytic(c.atom, f, c.grid.points(), c.closed_form);
        const auto am = minimum_between(a, lo, hi);
        detail(fmt("  a0=%g closed form (not judged): min W %.4g at %.4f, max W %.4g", a0, am->value, am->location,
                   std::ranges::max(a.values)));
        converged = converged && o.trajectory.converged;
        if (a0 > 0.0) {
            ratio_noise = m->value / top;
            min_noise = m->value;
        } else {
            min_clean = m->value;
        }
    }
    const bool pass = converged && ratio_noise > 1e-4 && min_clean * 10.0 <= min_noise;
    return report(8, pass,
                  fmt("Fano-zero suppression on fig8: a0=0.5 min/max %.3g (tol > 1e-4); a0=0 minimum %.3g vs %.3g "
                      "(need at least 10x smaller, got %.3gx)%s",
                      ratio_noise, min_clean, min_noise, min_noise / min_clean,
                      converged ? "" : "; a run did not converge"));
}

// 9 ------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

bool cli(const std::string& args)
{
    const std::string cmd = std::string(DFANO_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

bool criterion_9()
{
    const std::filesystem::path dir = std::filesystem::path(DFANO_TEST_TMP) / "determinism";
    std::filesystem::create_directories(dir);
    std::size_t identical = 0, total = 0;
    auto twice = [&](const std::string& label, const std::string& args) {
        const auto out = dir / (label + ".out");
        const bool ok1 = cli(args + " --no-timestamp --out " + out.string());
        const std::string first = slurp(out);
        const bool ok2 = cli(args + " --no-timestamp --out " + out.string());
        const bool same = ok1 && ok2 && !first.empty() && first == slurp(out);
        detail(fmt("%s: %s (%zu bytes)", label.c_str(), same ? "byte-identical" : "DIFFERENT or failed",
                   first.size()));
        identical += same;
        ++total;
    };
    for (const auto& name : preset_names())
        twice(name, "sweep --preset " + name);
    const auto cfg = dir / "oracle.yaml";
    std::ofstream(cfg) << "atom: {omega1: 0.5, omega2: 0.5, gamma1: 0.5, gamma2: 0.5, q_infinite: true}\n"
                          "field: {omega_laser: 1.0, b: 0.1, a0: 0.2}\n"
                          "grid: {omega_min: -2, omega_max: 4, n_points: 121}\n"
                          "oracle: {window: [-6, 8], n_points: 81, checkpoint_interval: 5}\n"
                          "run: {mode: both}\n";
    twice("oracle-both", "oracle --config " + cfg.string() + " --workers 1");
    twice("oracle-both-json", "oracle --config " + cfg.string() + " --format json-lines");
    return report(9, identical == total,
                  fmt("determinism: %zu of %zu repeated runs byte-identical (timestamp suppressed)", identical,
                      total));
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<bool()>> all{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                 criterion_6, criterion_7, criterion_8, criterion_9};
    bool ok = true;
    for (int i = 1; i <= 9; ++i) {
        if (only != 0 && only != i)
            continue;
        try {
            ok = all[static_cast<std::size_t>(i - 1)]() && ok;
        } catch (const std::exception& e) {
            ok = report(i, false, std::string("aborted: ") + e.what()) && ok;
        }
    }
    return ok ? 0 : 1;
}
