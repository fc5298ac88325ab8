#pragma once

#include "besovlab/functionals.hpp"

namespace besovlab {

/// Values of a functional along a parameter grid, with the sup, a limsup
/// surrogate over the tail fifth, and the extrapolated limit. When a
/// closed-form comparator is known it is stored as `target`.
struct SweepReport {
    std::string parameter;  // "r" or "eps"
    std::vector<double> grid;
    std::vector<double> values;
    double sup = 0.0;
    double tail_max = 0.0;  // max over the tail fifth of the grid
    double tail_min = 0.0;
    double extrapolated_limit = 0.0;
    std::string method;        // extrapolation tag
    double richardson = 0.0;   // two-node cross-check
    std::optional<double> target;
    std::optional<double> relative_error;
    std::optional<double> comparator;     // lip/ratio sweeps
    std::vector<double> ratio_series;     // values / comparator when defined
    double fit_residual = 0.0;            // max |fit - value| over the fitted nodes

    void finalize_stats() {
        require(!values.empty() && values.size() == grid.size(), "SweepReport: size mismatch");
        for (std::size_t i = 1; i < grid.size(); ++i)
            require((grid[i] > grid[i - 1]) == (grid[1] > grid[0]) && grid[i] != grid[i - 1],
                    "SweepReport: grid must be strictly monotone");
        sup = *std::max_element(values.begin(), values.end());
        const std::size_t tail = std::max<std::size_t>(1, values.size() / 5);
        // the tail is the end of the grid closest to the limit point
        tail_max = 0.0;
        tail_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = values.size() - tail; i < values.size(); ++i) {
            tail_max = std::max(tail_max, values[i]);
            tail_min = std::min(tail_min, values[i]);
        }
        for (double v : values) ensure_finite(v, "SweepReport");
        if (target && *target != 0.0)
            relative_error = std::abs(extrapolated_limit - *target) / std::abs(*target);
    }
};

namespace detail {

/// Extrapolate v(x) to x = 0: least-squares line through the 4 nodes with the
/// smallest x (intercept), Richardson through the 2 smallest as cross-check.
inline void extrapolate_to_zero(SweepReport& rep, const std::vector<double>& x) {
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    const std::size_t nfit = std::min<std::size_t>(4, x.size());
    std::vector<double> xs, vs;
    for (std::size_t k = 0; k < nfit; ++k) {
        xs.push_back(x[order[k]]);
        vs.push_back(rep.values[order[k]]);
    }
    const auto fit = linear_fit(xs, vs);
    rep.extrapolated_limit = fit[0];
    rep.fit_residual = 0.0;
    for (std::size_t k = 0; k < nfit; ++k)
        rep.fit_residual = std::max(rep.fit_residual, std::abs(fit[0] + fit[1] * xs[k] - vs[k]));
    if (x.size() >= 2) {
        const double x1 = x[order[0]], x2 = x[order[1]];
        const double v1 = rep.values[order[0]], v2 = rep.values[order[1]];
        rep.richardson = v1 - x1 * (v2 - v1) / (x2 - x1);
    }
    rep.method = "linfit4+richardson2";
}

} // namespace detail

// ---------------------------------------------------------------------------

/// Angular constant of the first-order limit: the |sigma . e|^p average over
/// the unit sphere. Closed form in 1D; trapezoid quadrature in 2D/3D.
inline double bbm_constant(double p, int N) {
    require(p >= 1.0, "bbm_constant: p must be >= 1");
    if (N == 1) return 2.0;
    if (N == 2) {
        // |cos| is smooth on the quarter period, so panels converge fully there
        return 4.0 * integrate_panels([p](double th) { return std::pow(std::cos(th), p); }, 0.0,
                                      M_PI / 2.0, 256);
    }
    if (N == 3) {
        // midpoint in the polar angle; the azimuthal factor integrates to 2 pi
        const int nphi = 2048;
        double s = 0.0;
        for (int i = 0; i < nphi; ++i) {
            const double phi = M_PI * (double(i) + 0.5) / nphi;
            s += std::pow(std::abs(std::cos(phi)), p) * std::sin(phi);
        }
        return s * (M_PI / nphi) * 2.0 * M_PI;
    }
    throw precondition_error("bbm_constant: N must be 1, 2 or 3");
}

/// L^p norm of the centered-difference gradient magnitude.
inline double gradient_lp_norm(const GridFunction& f, const Lp& p) {
    const double d = f.spacing();
    double acc = 0.0, mx = 0.0;
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (std::int64_t fl = 0; fl < f.size(); ++fl) {
        double g2 = 0.0;
        for (int a = 0; a < f.dim(); ++a) {
            auto up = idx, dn = idx;
            ++up[a]; --dn[a];
            const double g = (f.value_at(up) - f.value_at(dn)) / (2.0 * d);
            g2 += g * g;
        }
        const double g = std::sqrt(g2);
        if (p.is_inf) mx = std::max(mx, g);
        else acc += detail::pow_p(g, p);
        for (int a = f.dim() - 1; a >= 0; --a) {
            if (++idx[a] < f.shape()[a]) break;
            idx[a] = 0;
        }
    }
    if (p.is_inf) return mx;
    return std::pow(std::pow(d, double(f.dim())) * acc, 1.0 / p.p);
}

/// Exact discrete total variation of a 1D grid function (the BV surrogate for
/// the p = 1 gradient norm).
inline double total_variation_1d(const GridFunction& f) {
    require(f.dim() == 1, "total_variation_1d: 1D only");
    double tv = 0.0;
    for (std::int64_t i = 0; i + 1 < f.size(); ++i)
        tv += std::abs(f.values()[std::size_t(i + 1)] - f.values()[std::size_t(i)]);
    return tv;
}

/// Discrete Lipschitz constant: max neighbor slope over all axes.
inline double lipschitz_constant(const GridFunction& f) {
    const double d = f.spacing();
    double mx = 0.0;
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (std::int64_t fl = 0; fl < f.size(); ++fl) {
        for (int a = 0; a < f.dim(); ++a) {
            auto up = idx;
            ++up[a];
            if (up[a] < f.shape()[a])
                mx = std::max(mx, std::abs(f.value_at(up) - f.values()[std::size_t(fl)]) / d);
        }
        for (int a = f.dim() - 1; a >= 0; --a) {
            if (++idx[a] < f.shape()[a]) break;
            idx[a] = 0;
        }
    }
    return mx;
}

// ---------------------------------------------------------------------------

inline std::vector<double> default_bbm_grid() {
    return {0.80, 0.83, 0.86, 0.89, 0.92, 0.95, 0.97, 0.99};
}

/// (1-r) p [f]_{B^r_{p,p}}^p along r -> 1, against the first-order target
/// K_{p,N} ||grad f||_p^p (total variation in the 1D p=1 case).
inline SweepReport bbm_sweep(const GridFunction& f, double p, std::vector<double> r_grid = {},
                             int M = 1) {
    if (r_grid.empty()) r_grid = default_bbm_grid();
    for (double r : r_grid) require(r > 0.0 && r < 1.0, "bbm_sweep: r must lie in (0,1)");
    SweepReport rep;
    rep.parameter = "r";
    rep.grid = r_grid;
    const Lp lp = Lp::finite(p);
    DiffProfile prof(f, M, lp);
    HQuadrature quad;
    quad.analytic_tail = true;
    for (double r : r_grid) {
        const auto bes = besov_seminorm(f, {r, lp, lp, M}, quad, &prof);
        rep.values.push_back((1.0 - r) * p * std::pow(bes.value, p));
    }
    const double grad = (p == 1.0 && f.dim() == 1) ? total_variation_1d(f)
                                                   : gradient_lp_norm(f, lp);
    rep.target = bbm_constant(p, f.dim()) * std::pow(grad, p);
    std::vector<double> xs;
    for (double r : r_grid) xs.push_back(1.0 - r);
    detail::extrapolate_to_zero(rep, xs);
    rep.finalize_stats();
    return rep;
}

inline std::vector<double> default_ms_grid() {
    std::vector<double> g;
    for (int i = 0; i < 10; ++i) g.push_back(0.2 * std::pow(0.01 / 0.2, double(i) / 9.0));
    return g;
}

/// r p [f]_{B^r_{p,p}}^p along r -> 0, against 2 sigma_N ||f||_p^p. The far
/// tail dominates here, so the disjoint-translate closed form is mandatory.
inline SweepReport ms_sweep(const GridFunction& f, double p, std::vector<double> r_grid = {},
                            int M = 1) {
    if (r_grid.empty()) r_grid = default_ms_grid();
    for (double r : r_grid) require(r > 0.0 && r < 1.0, "ms_sweep: r must lie in (0,1)");
    SweepReport rep;
    rep.parameter = "r";
    rep.grid = r_grid;
    const Lp lp = Lp::finite(p);
    DiffProfile prof(f, M, lp);
    HQuadrature quad;
    quad.analytic_tail = true;
    for (double r : r_grid) {
        const auto bes = besov_seminorm(f, {r, lp, lp, M}, quad, &prof);
        rep.values.push_back(r * p * std::pow(bes.value, p));
    }
    rep.target = 2.0 * sphere_measure(f.dim()) * std::pow(lp_norm(f, lp), p);
    detail::extrapolate_to_zero(rep, r_grid);
    rep.finalize_stats();
    return rep;
}

inline std::vector<double> default_lip_grid() {
    return {0.80, 0.84, 0.88, 0.92, 0.95, 0.97, 0.98, 0.99};
}

/// (1-r)^{1/q} (||f||_inf + [f]_{B^r_{inf,q}}) along r -> 1, reported against
/// the comparator q^{-1/q} Lip(f). The equivalence constants are not pinned,
/// so the report carries the ratio series rather than a target.
inline SweepReport lip_sweep(const GridFunction& f, double q, std::vector<double> r_grid = {},
                             int M = 1) {
    require(q >= 1.0, "lip_sweep: q must be >= 1");
    if (r_grid.empty()) r_grid = default_lip_grid();
    SweepReport rep;
    rep.parameter = "r";
    rep.grid = r_grid;
    DiffProfile prof(f, M, Lp::inf());
    const double sup_norm = lp_norm(f, Lp::inf());
    for (double r : r_grid) {
        require(r > 0.0 && r < 1.0, "lip_sweep: r must lie in (0,1)");
        const auto bes = besov_seminorm(f, {r, Lp::inf(), Lp::finite(q), M}, {}, &prof);
        rep.values.push_back(std::pow(1.0 - r, 1.0 / q) * (sup_norm + bes.value));
    }
    rep.comparator = std::pow(q, -1.0 / q) * lipschitz_constant(f);
    if (*rep.comparator > 0.0)
        for (double v : rep.values) rep.ratio_series.push_back(v / *rep.comparator);
    std::vector<double> xs;
    for (double r : r_grid) xs.push_back(1.0 - r);
    detail::extrapolate_to_zero(rep, xs);
    rep.finalize_stats();
    return rep;
}

// ---------------------------------------------------------------------------

struct RatioSweepResult {
    SweepReport sweep;          // d_omega along the eps grid
    double nikolskii = 0.0;     // sup-shell seminorm over the kernel's reach
    double ratio = 0.0;         // sup_eps d_omega / omega(nikolskii)
    double tau = 0.0;           // worst quadrature slack along the grid
    bool hypothesis_ok = true;  // radial family (or declared minorant)
};

/// d_omega along an eps grid against omega(sup-shell seminorm): the two-sided
/// equivalence probe. The discretization keeps the upper bound structural, so
/// a ratio above 1 + tau is reported as a numerical failure.
inline RatioSweepResult equivalence_ratio_sweep(const GridFunction& f, const KernelFamily& family,
                                                const OmegaFn& w, const SemiNormSpec& spec,
                                                std::vector<double> eps_grid,
                                                const HQuadrature& quad = {},
                                                const DiffProfile* cache = nullptr) {
    require(!eps_grid.empty(), "equivalence_ratio_sweep: empty eps grid");
    spec.validate();
    RatioSweepResult out;
    out.hypothesis_ok = family.is_radial;
    out.sweep.parameter = "eps";
    out.sweep.grid = eps_grid;

    DiffProfile local(f, spec.M, spec.p);
    const DiffProfile* prof = cache ? cache : &local;

    std::sort(out.sweep.grid.begin(), out.sweep.grid.end(), std::greater<>());
    for (double eps : out.sweep.grid) {
        const auto r = d_omega(f, family, eps, w, spec, quad, prof);
        out.sweep.values.push_back(r.value);
        out.tau = std::max(out.tau, r.tau);
    }
    // the sup-shell seminorm over every shift the kernels reached
    out.nikolskii = nikolskii_seminorm(f, spec, quad, prof).value;
    detail::extrapolate_to_zero(out.sweep, out.sweep.grid);
    out.sweep.finalize_stats();
    const double denom = w(out.nikolskii);
    out.ratio = denom > 0.0 ? out.sweep.sup / denom : 0.0;
    if (out.ratio > 1.0 + std::max(out.tau, 0.02))
        throw numerical_error("equivalence_ratio_sweep: upper bound violated (ratio = " +
                              std::to_string(out.ratio) + ")");
    return out;
}

/// Decay probe: d_omega along eps = h_ref 2^{-k}, k = k_min..k_max.
inline SweepReport approx_decay_sweep(const GridFunction& f, const KernelFamily& family,
                                      const OmegaFn& w, const SemiNormSpec& spec, double h_ref,
                                      int k_min = 2, int k_max = 10,
                                      const DiffProfile* cache = nullptr) {
    SweepReport rep;
    rep.parameter = "eps";
    DiffProfile local(f, spec.M, spec.p);
    const DiffProfile* prof = cache ? cache : &local;
    for (int k = k_min; k <= k_max; ++k) {
        const double eps = h_ref * std::pow(2.0, -k);
        rep.grid.push_back(eps);
        rep.values.push_back(d_omega(f, family, eps, w, spec, {}, prof).value);
    }
    detail::extrapolate_to_zero(rep, rep.grid);
    rep.finalize_stats();
    return rep;
}

} // namespace besovlab
