#pragma once

#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "besovlab/common.hpp"

namespace besovlab {

// ---------------------------------------------------------------------------
// Radial profiles. Built-in kernels are sums of power pieces c * t^e on
// [t0, t1), which keeps every shell mass and moment in closed form; kernels
// obtained by averaging (radialize) fall back to panel quadrature.

struct PowerPiece {
    double c;   // coefficient
    double e;   // exponent
    double t0;  // piece support [t0, t1)
    double t1;
};

class PiecewisePowerProfile {
public:
    PiecewisePowerProfile() = default;
    explicit PiecewisePowerProfile(std::vector<PowerPiece> pieces) : pieces_(std::move(pieces)) {}

    double density(double t) const {
        double v = 0.0;
        for (const auto& p : pieces_)
            if (t >= p.t0 && t < p.t1) v += p.c * std::pow(t, p.e);
        return v;
    }

    /// Exact integral of profile(t) * t^w over [a, b]; +inf when a piece
    /// reaching 0 or infinity makes the integrand non-integrable there.
    double weighted_integral(double a, double b, double w) const {
        if (b <= a) return 0.0;
        double sum = 0.0;
        for (const auto& p : pieces_) {
            const double lo = std::max(a, p.t0);
            const double hi = std::min(b, p.t1);
            if (hi <= lo) continue;
            const double e = p.e + w;
            if (lo <= 0.0 && e <= -1.0) return std::numeric_limits<double>::infinity();
            if (std::isinf(hi)) {
                if (e >= -1.0) return std::numeric_limits<double>::infinity();
                sum += -p.c * std::pow(lo, e + 1.0) / (e + 1.0);
            } else if (lo <= 0.0) {
                sum += p.c * std::pow(hi, e + 1.0) / (e + 1.0);
            } else {
                sum += p.c * power_integral(e, lo, hi);
            }
        }
        return sum;
    }

    const std::vector<PowerPiece>& pieces() const { return pieces_; }
    void scale_coefficients(double s) {
        for (auto& p : pieces_) p.c *= s;
    }

private:
    std::vector<PowerPiece> pieces_;
};

// ---------------------------------------------------------------------------

/// Mollifier kernel: nonnegative radial density with unit mass (enforced at
/// construction within 1e-6). Evaluates as a density; shell masses come from
/// the kernel itself, in closed form for power-law profiles.
struct Kernel {
    std::string spec;
    int dim = 1;
    bool is_radial = true;
    double support_radius = std::numeric_limits<double>::infinity();
    std::function<double(double)> radial_density;  // value of rho(z) at |z| = t
    /// integral of radial_density(t) * t^w over [a, b]
    std::function<double(double, double, double)> weighted_integral;

    double density(double t) const { return radial_density(t); }

    /// Mass of the annulus a <= |z| <= b.
    double mass(double a, double b) const {
        return sphere_measure(dim) * weighted_integral(a, b, double(dim - 1));
    }

    double total_mass() const { return mass(0.0, support_radius); }

    /// Radial quadrature of rho(z) |z|^alpha; +inf for divergent tails of
    /// power-law profiles (closed-form tail test).
    double moment(double alpha) const {
        require(alpha >= 0.0, "moment: alpha must be >= 0");
        return sphere_measure(dim) * weighted_integral(0.0, support_radius, alpha + double(dim - 1));
    }

    /// Radius containing all but `tail` of the mass.
    double effective_radius(double tail = 1e-4) const {
        double hi = std::isfinite(support_radius) ? support_radius : 1.0;
        if (!std::isfinite(support_radius))
            while (mass(hi, support_radius) > tail && hi < 1e12) hi *= 2.0;
        const double total = mass(0.0, support_radius);
        double lo = hi * 1e-9;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mass(0.0, mid) >= total * (1.0 - tail)) hi = mid;
            else lo = mid;
        }
        return hi;
    }
};

namespace detail {

inline Kernel make_power_kernel(std::string spec, int dim, PiecewisePowerProfile profile,
                                double support_radius, bool normalize = true) {
    auto prof = std::make_shared<PiecewisePowerProfile>(std::move(profile));
    if (normalize) {
        const double m = sphere_measure(dim) * prof->weighted_integral(0.0, support_radius, double(dim - 1));
        require(std::isfinite(m) && m > 0.0, "kernel normalization: mass must be positive finite");
        prof->scale_coefficients(1.0 / m);
    }
    Kernel k;
    k.spec = std::move(spec);
    k.dim = dim;
    k.support_radius = support_radius;
    k.radial_density = [prof](double t) { return prof->density(t); };
    k.weighted_integral = [prof](double a, double b, double w) {
        return prof->weighted_integral(a, b, w);
    };
    return k;
}

} // namespace detail

namespace kernels {

/// Uniform density on the ball of radius r.
inline Kernel uniform(int dim, double r = 1.0) {
    require(r > 0.0, "uniform kernel: radius must be positive");
    return detail::make_power_kernel("uniform(r=" + std::to_string(r) + ")", dim,
                                     PiecewisePowerProfile({{1.0, 0.0, 0.0, r}}), r);
}

/// Annulus density 1/(C |h|^N) on 1 < |h| < 2 with C = sigma_N ln 2; the
/// scaled instances live on (eps, 2 eps).
inline Kernel choice2_base(int dim) {
    const double c = 1.0 / (sphere_measure(dim) * std::log(2.0));
    return detail::make_power_kernel("choice2()", dim,
                                     PiecewisePowerProfile({{c, -double(dim), 1.0, 2.0}}), 2.0,
                                     /*normalize=*/false);
}

/// Density (a/sigma_N) |h|^{a-N} on |h| < 1 with a = (s-r)q; unit mass holds
/// exactly by the radial integral.
inline Kernel sr_power_base(int dim, double a) {
    require(a > 0.0, "sr_power kernel: exponent (s-r)q must be positive");
    const double c = a / sphere_measure(dim);
    std::ostringstream os;
    os << "srpow(a=" << a << ")";
    return detail::make_power_kernel(os.str(), dim,
                                     PiecewisePowerProfile({{c, a - double(dim), 0.0, 1.0}}), 1.0,
                                     /*normalize=*/false);
}

/// Dispersal-kernel reweighting |h|^{sq} J(h) / J_moment for uniform J.
inline Kernel kpp_base(int dim, double s, double q, double J_radius = 1.0) {
    require(s > 0.0 && q >= 1.0, "kpp kernel: need s > 0, q >= 1");
    const double e = s * q;
    return detail::make_power_kernel("kpp(J=uniform,q=" + std::to_string(q) + ")", dim,
                                     PiecewisePowerProfile({{1.0, e, 0.0, J_radius}}), J_radius);
}

/// Slowly-decaying power density 1/(n sigma_N |h|^{N-1/n}) on |h| < 1; the
/// family parameter is eps = 1/n, and the shape changes with eps.
inline Kernel mspow_instance(int dim, double n) {
    require(n >= 1.0, "mspow kernel: n must be >= 1");
    const double c = 1.0 / (n * sphere_measure(dim));
    std::ostringstream os;
    os << "mspow(n=" << n << ")";
    return detail::make_power_kernel(os.str(), dim,
                                     PiecewisePowerProfile({{c, 1.0 / n - double(dim), 0.0, 1.0}}),
                                     1.0, /*normalize=*/false);
}

inline Kernel gaussian(int dim, double sigma = 1.0) {
    require(sigma > 0.0, "gaussian kernel: sigma must be positive");
    Kernel k;
    k.spec = "gaussian(sigma=" + std::to_string(sigma) + ")";
    k.dim = dim;
    k.support_radius = std::numeric_limits<double>::infinity();
    double norm = 1.0;
    if (dim == 1) norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    else if (dim == 2) norm = 1.0 / (2.0 * M_PI * sigma * sigma);
    else norm = 1.0 / (std::pow(2.0 * M_PI, 1.5) * sigma * sigma * sigma);
    k.radial_density = [norm, sigma](double t) { return norm * std::exp(-0.5 * t * t / (sigma * sigma)); };
    k.weighted_integral = [norm, sigma, dim](double a, double b, double w) {
        // closed forms for the common weights, panel quadrature otherwise
        const double s2 = M_SQRT2 * sigma;
        if (std::abs(w - double(dim - 1)) < 1e-13) {
            if (dim == 1)
                return norm * sigma * std::sqrt(M_PI / 2.0) * (std::erf(b / s2) - std::erf(a / s2));
            if (dim == 2)
                return norm * sigma * sigma *
                       (std::exp(-0.5 * a * a / (sigma * sigma)) - std::exp(-0.5 * b * b / (sigma * sigma)));
        }
        return integrate_panels(
            [&](double t) { return norm * std::exp(-0.5 * t * t / (sigma * sigma)) * std::pow(t, w); },
            std::max(a, 1e-14), std::min(b, 64.0 * sigma));
    };
    return k;
}

} // namespace kernels

// ---------------------------------------------------------------------------
// Claim-A style radialization: average the dilates rho(theta z) over
// theta in [theta0, 1] with the mass-preserving constant
// C = (1 - theta0) / int_{theta0}^1 theta^{-N} d theta.

struct RadializeResult {
    Kernel kernel;
    double annulus_lo = 0.0;   // reported annulus with positive infimum
    double annulus_hi = 0.0;
    double annulus_inf = 0.0;
};

inline RadializeResult radialize(const Kernel& base, double theta0) {
    require(theta0 > 0.0 && theta0 < 1.0, "radialize: theta0 must lie in (0,1)");
    require(base.is_radial, "radialize: base kernel must be radial");
    const int N = base.dim;
    const double C = (1.0 - theta0) / power_integral(-double(N), theta0, 1.0);
    const bool compact = std::isfinite(base.support_radius);
    const double R_out = compact ? base.support_radius / theta0
                                 : std::numeric_limits<double>::infinity();
    const double R_scan = (compact ? base.support_radius : base.effective_radius(1e-10)) / theta0;

    // rho*(t) = C/((1-theta0) t) * int_{theta0 t}^{t} rho(u) du
    auto base_wi = base.weighted_integral;
    const double scale = C / (1.0 - theta0);
    auto dens = [base_wi, scale, theta0](double t) {
        if (t <= 0.0) return 0.0;  // removable; density finite a.e.
        return scale / t * base_wi(theta0 * t, t, 0.0);
    };

    Kernel k;
    k.spec = "radialize(" + base.spec + "," + std::to_string(theta0) + ")";
    k.dim = N;
    k.support_radius = R_out;
    k.radial_density = dens;
    k.weighted_integral = [dens, R_scan](double a, double b, double w) {
        return integrate_panels([&](double t) { return dens(t) * std::pow(t, w); },
                                std::max(a, 1e-300), std::min(b, R_scan * 1.25));
    };

    // verify positivity of the output on some annulus: scan dyadic annuli of
    // the support and grow the widest contiguous run of positive infima
    RadializeResult res{std::move(k), 0.0, 0.0, 0.0};
    const int n_ann = 64;
    std::vector<double> infs(n_ann, 0.0);
    for (int i = 0; i < n_ann; ++i) {
        const double a = R_scan * double(i) / n_ann + 1e-12;
        const double b = R_scan * double(i + 1) / n_ann;
        double lo = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 16; ++j) lo = std::min(lo, dens(a + (b - a) * j / 16.0));
        infs[std::size_t(i)] = lo;
    }
    int best_lo = -1, best_hi = -1;
    for (int i = 0, run = -1; i <= n_ann; ++i) {
        if (i < n_ann && infs[std::size_t(i)] > 0.0) {
            if (run < 0) run = i;
        } else if (run >= 0) {
            if (best_lo < 0 || i - run > best_hi - best_lo) { best_lo = run; best_hi = i; }
            run = -1;
        }
    }
    if (best_lo < 0)
        throw numerical_error("radialize: output has no annulus with positive infimum");
    res.annulus_lo = R_scan * double(best_lo) / n_ann;
    res.annulus_hi = R_scan * double(best_hi) / n_ann;
    res.annulus_inf = *std::min_element(infs.begin() + best_lo, infs.begin() + best_hi);
    return res;
}

// ---------------------------------------------------------------------------
// Claim-B style clip-and-stack: pile rescaled copies of the annular plateau
// Psi = alpha 1_{(r1,r2)} until the support reaches below r2/5, producing a
// kernel that dominates a continuous nondecreasing radial minorant.

struct ClipStackResult {
    Kernel kernel;
    int levels = 0;               // deepest copy index k; k+1 copies in total
    double normalization = 1.0;   // c: mass of the raw stack
    double minorant_slope = 0.0;  // slope of the raw minorant, 5 alpha/(4 r2)
    double r1 = 0.0, r2 = 0.0, alpha = 0.0;
    std::function<double(double)> minorant;  // normalized: kernel.density >= minorant a.e.
    double minorant_core_mass = 0.0;         // mass of the minorant over |z| < r2/4
};

inline ClipStackResult clip_stack(int dim, double r1, double r2, double alpha) {
    require(0.0 < r1 && r1 < r2, "clip_stack: need 0 < r1 < r2");
    require(alpha > 0.0, "clip_stack: alpha must be positive");
    ClipStackResult res;
    res.r1 = r1; res.r2 = r2; res.alpha = alpha;

    std::vector<PowerPiece> pieces;
    if (r1 < r2 / 4.0) {
        res.levels = 0;  // single copy suffices
        pieces.push_back({alpha, 0.0, r1, r2});
    } else {
        const double ratio = r1 / r2;
        const int k = int(std::floor(std::log(0.2) / std::log(ratio))) + 1;
        res.levels = k;
        for (int j = 0; j <= k; ++j) {
            const double th = std::pow(ratio, double(j));
            pieces.push_back({alpha * std::pow(th, -double(dim)), 0.0, th * r1, th * r2});
        }
    }
    PiecewisePowerProfile prof(pieces);
    const double c = sphere_measure(dim) * prof.weighted_integral(0.0, r2, double(dim - 1));
    res.normalization = c;
    std::ostringstream os;
    os << "clipstack(" << r1 << "," << r2 << "," << alpha << ")";
    res.kernel = detail::make_power_kernel(os.str(), dim, std::move(prof), r2);

    res.minorant_slope = 5.0 * alpha / (4.0 * r2);
    const double slope = res.minorant_slope / c;
    res.minorant = [slope, r2](double t) {
        const double u = t - r2 / 5.0;
        return (u > 0.0 && t <= r2) ? slope * u : 0.0;
    };
    // int_{B_{r2/4}} Phi = sigma_N * slope * int_{r2/5}^{r2/4} (t - r2/5) t^{N-1} dt
    res.minorant_core_mass =
        sphere_measure(dim) *
        integrate_panels([&](double t) { return res.minorant(t) * std::pow(t, double(dim - 1)); },
                         r2 / 5.0, r2 / 4.0);
    return res;
}

// ---------------------------------------------------------------------------

/// Mollifier family: a base kernel with the scaling rule
/// rho_eps(h) = eps^{-N} rho(h/eps), or an explicit eps -> kernel map for
/// families whose shape changes with eps.
struct KernelFamily {
    std::string spec;
    int dim = 1;
    bool is_radial = true;
    enum class Rule { scaling, explicit_eps } rule = Rule::scaling;
    Kernel base;
    std::function<Kernel(double)> make_explicit;

    Kernel instantiate(double eps) const {
        require(eps > 0.0, "instantiate: eps must be positive");
        if (rule == Rule::explicit_eps) return make_explicit(eps);
        const int N = dim;
        Kernel k;
        std::ostringstream os;
        os << base.spec << "@eps=" << eps;
        k.spec = os.str();
        k.dim = N;
        k.is_radial = base.is_radial;
        k.support_radius = base.support_radius * eps;
        auto bd = base.radial_density;
        auto bw = base.weighted_integral;
        const double epsN = std::pow(eps, -double(N));
        k.radial_density = [bd, epsN, eps](double t) { return epsN * bd(t / eps); };
        // int eps^{-N} rho(t/eps) t^w dt = eps^{w+1-N} int rho(u) u^w du
        k.weighted_integral = [bw, eps, N](double a, double b, double w) {
            return std::pow(eps, w + 1.0 - double(N)) * bw(a / eps, b / eps, w);
        };
        return k;
    }

    static KernelFamily scaling_family(Kernel base_kernel) {
        KernelFamily f;
        f.spec = base_kernel.spec;
        f.dim = base_kernel.dim;
        f.is_radial = base_kernel.is_radial;
        f.rule = Rule::scaling;
        f.base = std::move(base_kernel);
        return f;
    }

    static KernelFamily explicit_family(std::string spec, int dim,
                                        std::function<Kernel(double)> make) {
        KernelFamily f;
        f.spec = std::move(spec);
        f.dim = dim;
        f.rule = Rule::explicit_eps;
        f.make_explicit = std::move(make);
        return f;
    }
};

/// The slowly-decaying power family with eps = 1/n.
inline KernelFamily mspow_family(int dim) {
    return KernelFamily::explicit_family("mspow()", dim, [dim](double eps) {
        return kernels::mspow_instance(dim, 1.0 / eps);
    });
}

// ---------------------------------------------------------------------------
// Kernel spec grammar: uniform(r=1), gaussian(sigma=1), choice2(),
// imbnikol(r=0.25,q=2), kpp(J=uniform,q=2), mspow(), radialize(base,theta0),
// clipstack(r1,r2,alpha). Whitespace-insensitive; arguments may be named or
// positional. `s_context` supplies the smoothness parameter to the families
// whose profile depends on it.

namespace detail {

struct SpecCall {
    std::string name;
    std::vector<std::string> args;
};

inline SpecCall parse_call(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    const auto lp = s.find('(');
    require(lp != std::string::npos && !s.empty() && s.back() == ')',
            "kernel spec must look like name(args): got '" + raw + "'");
    SpecCall call;
    call.name = s.substr(0, lp);
    const std::string inner = s.substr(lp + 1, s.size() - lp - 2);
    if (!inner.empty()) {
        int depth = 0;
        std::string cur;
        for (char c : inner) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) { call.args.push_back(cur); cur.clear(); }
            else cur += c;
        }
        call.args.push_back(cur);
    }
    return call;
}

inline double named_or_positional(const SpecCall& c, const std::string& key, std::size_t pos,
                                  double dflt) {
    for (const auto& a : c.args) {
        const auto eq = a.find('=');
        if (eq != std::string::npos && a.substr(0, eq) == key) return std::stod(a.substr(eq + 1));
    }
    if (pos < c.args.size() && c.args[pos].find('=') == std::string::npos)
        return std::stod(c.args[pos]);
    return dflt;
}

} // namespace detail

inline KernelFamily parse_kernel_family(const std::string& spec, int dim,
                                        std::optional<double> s_context = std::nullopt) {
    const auto call = detail::parse_call(spec);
    if (call.name == "uniform")
        return KernelFamily::scaling_family(
            kernels::uniform(dim, detail::named_or_positional(call, "r", 0, 1.0)));
    if (call.name == "gaussian")
        return KernelFamily::scaling_family(
            kernels::gaussian(dim, detail::named_or_positional(call, "sigma", 0, 1.0)));
    if (call.name == "choice2") return KernelFamily::scaling_family(kernels::choice2_base(dim));
    if (call.name == "imbnikol") {
        require(s_context.has_value(), "imbnikol kernel needs the experiment's s");
        const double r = detail::named_or_positional(call, "r", 0, 0.25);
        const double q = detail::named_or_positional(call, "q", 1, 2.0);
        require(*s_context > r, "imbnikol kernel needs r < s");
        return KernelFamily::scaling_family(kernels::sr_power_base(dim, (*s_context - r) * q));
    }
    if (call.name == "kpp") {
        require(s_context.has_value(), "kpp kernel needs the experiment's s");
        for (const auto& a : call.args)
            if (a.rfind("J=", 0) == 0)
                require(a == "J=uniform", "kpp kernel: only J=uniform is built in");
        const double q = detail::named_or_positional(call, "q", 1, 2.0);
        return KernelFamily::scaling_family(kernels::kpp_base(dim, *s_context, q));
    }
    if (call.name == "mspow") return mspow_family(dim);
    if (call.name == "radialize") {
        require(call.args.size() == 2, "radialize(base,theta0) needs two arguments");
        auto inner = parse_kernel_family(call.args[0], dim, s_context);
        require(inner.rule == KernelFamily::Rule::scaling,
                "radialize: base must be a scaling family");
        const double th = std::stod(call.args[1]);
        return KernelFamily::scaling_family(radialize(inner.base, th).kernel);
    }
    if (call.name == "clipstack") {
        require(call.args.size() == 3, "clipstack(r1,r2,alpha) needs three arguments");
        return KernelFamily::scaling_family(clip_stack(dim, std::stod(call.args[0]),
                                                       std::stod(call.args[1]),
                                                       std::stod(call.args[2]))
                                                .kernel);
    }
    throw precondition_error("unknown kernel family '" + call.name + "'");
}

} // namespace besovlab
