// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Exit status is the number of failed criteria.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "besovlab/cli_app.hpp"

using namespace besovlab;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(const char* id, const char* name, bool pass, const std::string& detail,
            double elapsed) {
    std::printf("[%s] %-36s %s (%s; %.1f s)\n", id, name, pass ? "PASS" : "FAIL", detail.c_str(),
                elapsed);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct CorpusEntry {
    const char* fspec;
    double lo, hi;
    bool smooth;
};

const CorpusEntry kCorpus[12] = {
    {"indicator(0,1)", -3, 4, false},     {"indicator(0,2)", -3, 5, false},
    {"staircase()", -3, 5.5, false},      {"tent()", -4, 4, false},
    {"trapezoid(0,1,2,3)", -3, 6, false}, {"trianglewave()", -4.5, 4.5, false},
    {"cusp()", -4, 4, false},             {"bump()", -4, 4, true},
    {"gaussian()", -8.5, 8.5, true},      {"polybump(3)", -4, 4, true},
    {"sinebump(3)", -4, 4, true},         {"twobumps()", -5.5, 5.5, true},
};

const char* kFamilies[4] = {"uniform(r=1)", "gaussian(sigma=1)", "choice2()",
                            "kpp(J=uniform,q=2)"};
const char* kOmegas[3] = {"pow(1)", "pow(0.5)", "log1p"};

// Frozen lower ratio bands per (family, omega), calibrated over the corpus at
// spacing 2e-3 ahead of the build (observed minima 0.333..0.772, drift under
// spacing halving below 0.1%); frozen at 75% of the observed minimum.
const double kRatioFloor[4][3] = {
    {0.25, 0.42, 0.36},  // uniform
    {0.30, 0.46, 0.41},  // gaussian
    {0.44, 0.57, 0.55},  // choice2
    {0.30, 0.47, 0.41},  // kpp
};

void criterion1_ms_limit() {
    Timer t;
    auto f = make_grid_function(gen::indicator(0, 1), Box::interval(-2, 3), 1e-3, 2.0);
    auto rep = ms_sweep(f, 1.0);  // default grid 0.2 -> 0.01 geometric
    double node_worst = 0.0;
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        const double r = rep.grid[i];
        const double closed = 4.0 * (1.0 + r / (1.0 - r));
        node_worst = std::max(node_worst, std::abs(rep.values[i] - closed) / closed);
    }
    const double lim_err = std::abs(rep.extrapolated_limit - 4.0) / 4.0;
    const bool pass = node_worst <= 0.02 && lim_err <= 0.02 && t.seconds() < 10.0;
    report("C1", "MS limit r -> 0 (indicator)", pass,
           fmt("extrapolated %.5f, relerr %.3f%%, worst node %.3f%%", rep.extrapolated_limit,
               100 * lim_err, 100 * node_worst),
           t.seconds());
}

void criterion2_bbm_limit() {
    Timer t;
    auto tent = make_grid_function(gen::tent(), Box::interval(-4, 4), 1e-3, 3.0);
    auto r1 = bbm_sweep(tent, 1.0);
    const double e1 = std::abs(r1.extrapolated_limit - 4.0) / 4.0;
    auto gauss = make_grid_function(gen::gaussian(), Box::interval(-12, 12), 1e-3, 1.0);
    auto r2 = bbm_sweep(gauss, 2.0);
    const double target2 = 2.0 * std::sqrt(M_PI / 2.0);
    const double e2 = std::abs(r2.extrapolated_limit - target2) / target2;
    const bool pass = e1 <= 0.05 && e2 <= 0.05 && t.seconds() < 60.0;
    report("C2", "BBM limit r -> 1 (tent, gaussian)", pass,
           fmt("tent %.5f (err %.2f%%), gaussian %.5f vs %.5f (err %.2f%%)", r1.extrapolated_limit,
               100 * e1, r2.extrapolated_limit, target2, 100 * e2),
           t.seconds());
}

void criterion3_upper_bound() {
    Timer t;
    std::vector<double> eps;
    for (int k = 0; k <= 6; ++k) eps.push_back(0.5 * std::pow(2.0, -k));
    SemiNormSpec spec{0.5, Lp::finite(1), Lp::inf(), 1};
    int checked = 0, violations = 0;
    double worst = 0.0;
    for (const auto& e : kCorpus) {
        auto f = make_grid_function(parse_function_spec(e.fspec), Box::interval(e.lo, e.hi), 1e-3);
        DiffProfile prof(f, spec.M, spec.p);
        auto nik = nikolskii_seminorm(f, spec, {}, &prof);
        for (const char* fam_spec : kFamilies) {
            auto fam = parse_kernel_family(fam_spec, 1, spec.s);
            for (const char* om : kOmegas) {
                auto w = parse_omega_spec(om);
                const double bound = w(nik.value) * 1.02;
                for (double e2 : eps) {
                    const auto r = d_omega(f, fam, e2, w, spec, {}, &prof);
                    ++checked;
                    worst = std::max(worst, r.value / w(nik.value));
                    if (r.value > bound) ++violations;
                }
            }
        }
    }
    const bool pass = violations == 0 && t.seconds() < 300.0;
    report("C3", "upper bound over corpus grid", pass,
           fmt("%d nodes, %d violations, worst ratio %.4f", checked, violations, worst),
           t.seconds());
}

void criterion4_two_sided_ratio() {
    Timer t;
    // sharp case: indicator against the dyadic annulus kernel at s = 1
    auto ind = make_grid_function(gen::indicator(0, 1), Box::interval(-3, 4), 1e-3, 3.0);
    auto choice2 = parse_kernel_family("choice2()", 1);
    std::vector<double> eps_sharp;
    for (int k = 1; k <= 7; ++k) eps_sharp.push_back(std::pow(2.0, -k));
    auto sharp = equivalence_ratio_sweep(ind, choice2, omega::id(),
                                         {1.0, Lp::finite(1), Lp::inf(), 1}, eps_sharp);
    const bool sharp_ok = std::abs(sharp.ratio - 1.0) <= 0.03;

    // full corpus: frozen bands and refinement stability
    std::vector<double> eps;
    for (int k = 0; k <= 5; ++k) eps.push_back(0.5 * std::pow(2.0, -k));
    SemiNormSpec spec{0.5, Lp::finite(1), Lp::inf(), 1};
    bool bands_ok = true, stable_ok = true;
    double worst_shift = 1.0;
    for (int fi = 0; fi < 4; ++fi) {
        auto fam = parse_kernel_family(kFamilies[fi], 1, spec.s);
        for (int oi = 0; oi < 3; ++oi) {
            auto w = parse_omega_spec(kOmegas[oi]);
            for (const auto& e : kCorpus) {
                double ratio2[2];
                int si = 0;
                for (double sp : {2e-3, 1e-3}) {
                    auto f = make_grid_function(parse_function_spec(e.fspec),
                                                Box::interval(e.lo, e.hi), sp);
                    auto res = equivalence_ratio_sweep(f, fam, w, spec, eps);
                    ratio2[si++] = res.ratio;
                    if (res.ratio < kRatioFloor[fi][oi] || res.ratio > 1.02) bands_ok = false;
                }
                const double shift = std::max(ratio2[0] / ratio2[1], ratio2[1] / ratio2[0]);
                worst_shift = std::max(worst_shift, shift);
                if (shift > 1.5) stable_ok = false;
            }
        }
    }
    const bool pass = sharp_ok && bands_ok && stable_ok;
    report("C4", "two-sided equivalence ratios", pass,
           fmt("sharp ratio %.4f, bands %s, worst refinement shift x%.3f", sharp.ratio,
               bands_ok ? "in" : "OUT", worst_shift),
           t.seconds());
}

void criterion5_approx_decay() {
    Timer t;
    auto fam = parse_kernel_family("uniform(r=1)", 1);
    SemiNormSpec spec{0.5, Lp::finite(1), Lp::inf(), 1};
    const double h_ref = 2.0;
    double worst_ratio = 0.0;
    double worst_ratio_sq = 0.0;
    for (const auto& e : kCorpus) {
        if (!e.smooth) continue;
        auto f = make_grid_function(parse_function_spec(e.fspec), Box::interval(e.lo, e.hi), 4e-4);
        DiffProfile prof(f, spec.M, spec.p);
        auto rep = approx_decay_sweep(f, fam, omega::id(), spec, h_ref, 2, 10, &prof);
        worst_ratio = std::max(worst_ratio, rep.values.back() / rep.values.front());
        auto rep2 = approx_decay_sweep(f, fam, omega::pow(2.0), spec, h_ref, 2, 10, &prof);
        worst_ratio_sq = std::max(worst_ratio_sq, rep2.values.back() / rep2.values.front());
    }
    // indicator at s = 1: no decay, pinned near 2 across the same range
    auto ind = make_grid_function(gen::indicator(0, 1), Box::interval(-3, 4), 4e-4, 2.5);
    auto flat = approx_decay_sweep(ind, fam, omega::id(), {1.0, Lp::finite(1), Lp::inf(), 1},
                                   h_ref, 2, 10);
    double flat_worst = 0.0;
    for (double v : flat.values) flat_worst = std::max(flat_worst, std::abs(v - 2.0) / 2.0);

    const bool decay_ok = worst_ratio <= 0.05;
    const bool flat_ok = flat_worst <= 0.10;
    report("C5", "approximation decay along eps", decay_ok && flat_ok,
           fmt("smooth decay ratio %.4f (stated bound 0.05), indicator drift %.2f%%", worst_ratio,
               100 * flat_worst),
           t.seconds());
    if (!decay_ok) {
        // scaling families obey value(eps) ~ eps^{M-s} for the identity
        // modulus, so the 2^-10 vs 2^-2 ratio cannot fall under
        // 2^{-8(M-s)} = 6.25% at s = 1/2; the measured number sits exactly on
        // that law. With omega = pow(2) the same probe decays quadratically:
        std::printf("     note: with omega=pow(2) the worst smooth decay ratio is %.4f\n",
                    worst_ratio_sq);
    }
}

void criterion6_cesaro() {
    Timer t;
    auto chk = cesaro_bound_check(1 << 20, default_cesaro_grid(60));
    const bool pass = chk.within_bound && chk.sup >= 0.60 && t.seconds() < 1.0 &&
                      std::abs(chk.bound - 1.0614756) < 1e-6;
    report("C6", "weighted Cesaro bound", pass,
           fmt("sup %.5f at eps %.4g, bound %.5f", chk.sup, chk.arg_eps, chk.bound), t.seconds());
}

void criterion7_nonlimit() {
    Timer t;
    auto f = nonlimit_function(0.5, 2.0, 2.0, 1, 10);
    const double r4 = f.shells[1].local_value / f.shells[0].local_value;
    const double r8 = f.shells[2].local_value / f.shells[0].local_value;
    const bool ratios_ok = std::abs(r4 / M_SQRT2 - 1.0) <= 0.10 &&
                           std::abs(r8 / std::sqrt(3.0) - 1.0) <= 0.10;
    double quark_max = 0.0;
    for (double v : f.quark_values) quark_max = std::max(quark_max, v);
    const bool pass = ratios_ok && f.quark_within_bound && t.seconds() < 120.0;
    report("C7", "non-limiting multiscale bumps", pass,
           fmt("shell ratios %.4f/%.4f vs sqrt2/sqrt3, quark max %.4f <= %.4f", r4, r8, quark_max,
               f.quark_bound),
           t.seconds());
}

void criterion8_noncompactness() {
    Timer t;
    const int M = 1;
    const double s = 0.5, p = 2.0, q = 2.0;
    auto fam = parse_kernel_family("uniform(r=1)", 1);
    std::vector<GridFunction> seq;
    std::vector<double> norms, energies;
    for (double n : {1.0, 4.0, 16.0, 64.0, 256.0}) {
        seq.push_back(noncompact_sequence(M, s, p, n));
        norms.push_back(lp_norm(seq.back(), Lp::finite(p)));
        energies.push_back(
            d_omega(seq.back(), fam, 1.0 / n, omega::pow(p), {s, Lp::finite(p), Lp::inf(), M})
                .value);
    }
    double norm_drift = 0.0;
    for (double v : norms) norm_drift = std::max(norm_drift, std::abs(v / norms[0] - 1.0));
    const double eratio = *std::max_element(energies.begin(), energies.end()) /
                          *std::min_element(energies.begin(), energies.end());
    auto probe = compactness_probe(seq, Box::interval(-1, 1), Lp::finite(p));
    const bool part1 = norm_drift <= 0.01 && eratio <= 4.0 && probe.min_offdiag >= 0.5 * norms[0];

    // slow-kernel variant: fitted decay exponents and boundedness at gamma = 1/q
    auto fit_exponent = [&](double gamma) {
        std::vector<double> lx, ly;
        for (double n : {4.0, 8.0, 16.0, 32.0, 64.0}) {
            auto item = noncompact_besov_sequence(M, s, p, q, gamma, n);
            lx.push_back(std::log(n));
            ly.push_back(std::log(item.functional));
        }
        return linear_fit(lx, ly)[1];
    };
    const double e0 = fit_exponent(0.0);
    const double eh = fit_exponent(1.0 / (2.0 * q));
    double bmax = 0.0, bmin = 1e300;
    for (double n : {4.0, 8.0, 16.0, 32.0, 64.0}) {
        const double v = noncompact_besov_sequence(M, s, p, q, 1.0 / q, n).functional;
        bmax = std::max(bmax, v);
        bmin = std::min(bmin, v);
    }
    const bool part2 = std::abs(e0 - (-1.0)) <= 0.15 && std::abs(eh - (-0.5)) <= 0.15 &&
                       bmax / bmin <= 4.0;
    const bool pass = part1 && part2 && t.seconds() < 180.0;
    report("C8", "non-compact concentrating sequences", pass,
           fmt("norm drift %.2f%%, energy x%.2f, min dist %.3f; exponents %.3f/%.3f, "
               "bounded x%.2f",
               100 * norm_drift, eratio, probe.min_offdiag, e0, eh, bmax / bmin),
           t.seconds());
}

void criterion9_property_suites() {
    Timer t;
    bool ok = true;
    std::string notes;

    // exact polynomial annihilation
    {
        auto f = make_grid_function(gen::poly({1.0, -2.0, 3.0}), Box::interval(-2, 2), 0.01);
        auto d = forward_difference(f, LatticeShift::of(7, 0.01), 3, false);
        double dev = 0.0;
        for (std::int64_t i = 0; i < d.size() - 22; ++i)
            dev = std::max(dev, std::abs(d.values()[std::size_t(i)]));
        if (dev > 1e-12) { ok = false; notes += " annihilation"; }
    }
    // triangle identity on 100 random pairs
    {
        std::mt19937_64 rng(2718);
        std::vector<double> v(400, 0.0);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 160; i < 240; ++i) v[std::size_t(i)] = u(rng);
        GridFunction f(1, {0, 0, 0}, 0.01, {400, 1, 1}, std::move(v));
        std::uniform_int_distribution<int> shift(-30, 30);
        int done = 0;
        while (done < 100) {
            const int hz = shift(rng), zz = shift(rng);
            if (hz == 0 || zz == 0 || hz == zz) continue;
            ++done;
            for (auto p : {Lp::finite(1), Lp::finite(2), Lp::inf()}) {
                const double lhs = diff_lp_norm(f, LatticeShift::of(hz, 0.01), 1, p);
                const double a = diff_lp_norm(f, LatticeShift::of(zz, 0.01), 1, p);
                const double b = diff_lp_norm(f, LatticeShift::of(zz - hz, 0.01), 1, p);
                if (lhs > a + b + 1e-12 * (1 + a + b)) { ok = false; notes += " triangle"; }
            }
        }
    }
    // iterated-difference ratios under the frozen constants
    {
        const double frozen[3] = {0.0, 2.2, 4.4};
        std::mt19937_64 rng(31415);
        std::uniform_int_distribution<int> shift(1, 12);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> v(300, 0.0);
            for (int i = 120; i < 180; ++i) v[std::size_t(i)] = u(rng);
            GridFunction f(1, {0, 0, 0}, 0.01, {300, 1, 1}, std::move(v));
            const int h1 = shift(rng), h2 = shift(rng);
            for (int M : {1, 2}) {
                for (auto p : {Lp::finite(1), Lp::finite(2), Lp::inf()}) {
                    const double num =
                        diff_lp_norm(f, LatticeShift::of(h1 + h2, 0.01), 2 * M, p);
                    const double den = diff_lp_norm(f, LatticeShift::of(h1, 0.01), M, p) +
                                       diff_lp_norm(f, LatticeShift::of(h2, 0.01), M, p);
                    if (den > 1e-14 && num / den > frozen[M]) { ok = false; notes += " iterated"; }
                }
            }
        }
    }
    // kernel mass and moment identities
    {
        for (const char* fs : kFamilies) {
            auto fam = parse_kernel_family(fs, 1, 0.5);
            for (double e : {1.0, 0.25})
                if (std::abs(fam.instantiate(e).total_mass() - 1.0) > 1e-6) {
                    ok = false;
                    notes += " kernel-mass";
                }
        }
        auto u = kernels::uniform(1, 1.0);
        if (std::abs(u.moment(2.0) - 1.0 / 3.0) > 1e-9) { ok = false; notes += " moment"; }
        auto c2 = parse_kernel_family("choice2()", 1).instantiate(0.1);
        if (std::abs(c2.moment(1.0) - 0.1 / std::log(2.0)) > 1e-9) {
            ok = false;
            notes += " moment2";
        }
    }
    // radialize / clip-stack: unit mass and covering minorant
    {
        auto rad = radialize(kernels::uniform(1, 1.0), 0.5);
        if (std::abs(rad.kernel.total_mass() - 1.0) > 1e-6) { ok = false; notes += " radialize"; }
        auto cs = clip_stack(1, 0.3, 1.0, 1.0);
        if (std::abs(cs.kernel.total_mass() - 1.0) > 1e-6) { ok = false; notes += " clipmass"; }
        for (int i = 0; i <= 1000; ++i) {
            const double x = 0.2 + (0.9999 - 0.2) * i / 1000.0;
            if (cs.kernel.density(x) <= 0.0 || cs.kernel.density(x) < cs.minorant(x) - 1e-12) {
                ok = false;
                notes += " clipcover";
                break;
            }
        }
        if (cs.minorant_core_mass <= 0.0) { ok = false; notes += " clipcore"; }
    }
    // omega subadditivity constants, exact on the grid
    {
        const auto grid = omega_default_grid();
        if (std::abs(subadditivity_constant(omega::pow(0.5), grid) - 1.0) > 1e-12 ||
            std::abs(subadditivity_constant(omega::pow(2.0), grid) - 2.0) > 1e-12 ||
            std::abs(subadditivity_constant(omega::log1p(), grid) - 1.0) > 1e-12) {
            ok = false;
            notes += " omega";
        }
    }
    report("C9", "property suites", ok, ok ? "all property families hold" : ("failing:" + notes),
           t.seconds());
}

} // namespace

int main() {
    std::printf("besovlab acceptance suite\n");
    criterion1_ms_limit();
    criterion2_bbm_limit();
    criterion3_upper_bound();
    criterion4_two_sided_ratio();
    criterion5_approx_decay();
    criterion6_cesaro();
    criterion7_nonlimit();
    criterion8_noncompactness();
    criterion9_property_suites();
    std::printf("ACCEPTANCE: %d/9 criteria passed\n", 9 - g_failures);
    return g_failures;
}
