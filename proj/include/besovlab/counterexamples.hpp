#pragma once

#include "besovlab/limits.hpp"

namespace besovlab {

/// u_j = k when j = 2^k, 0 otherwise: unbounded, yet with bounded weighted
/// Cesaro sums eps * sum_j 2^{-j eps} u_j.
inline std::vector<double> cesaro_sequence(int J) {
    require(J >= 2, "cesaro_sequence: J must be >= 2");
    std::vector<double> u(std::size_t(J) + 1, 0.0);  // u[0] unused
    for (int k = 0; (std::int64_t(1) << k) <= J; ++k) u[std::size_t(1) << k] = double(k);
    return u;
}

struct CesaroCheck {
    double sup = 0.0;        // over the eps grid of eps * sum_j 2^{-j eps} u_j
    double arg_eps = 0.0;    // attaining eps
    double bound = 0.0;      // 2 / (e ln 2)
    bool within_bound = false;
    std::vector<double> values;  // one per grid eps
};

/// Evaluate the weighted sums exactly (summing over the nonzero j = 2^k only)
/// and compare the sup against the closed-form bound.
inline CesaroCheck cesaro_bound_check(int J, const std::vector<double>& eps_grid) {
    require(J >= 2, "cesaro_bound_check: J must be >= 2");
    require(!eps_grid.empty(), "cesaro_bound_check: empty grid");
    CesaroCheck out;
    out.bound = 2.0 / (M_E * std::log(2.0));
    for (double eps : eps_grid) {
        require(eps > 0.0, "cesaro_bound_check: eps must be positive");
        double sum = 0.0;
        for (int k = 1; (std::int64_t(1) << k) <= J; ++k)
            sum += double(k) * std::pow(2.0, -double(std::int64_t(1) << k) * eps);
        const double v = eps * sum;
        out.values.push_back(v);
        if (v > out.sup) {
            out.sup = v;
            out.arg_eps = eps;
        }
    }
    out.within_bound = out.sup <= out.bound * (1.0 + 1e-12);
    return out;
}

inline std::vector<double> default_cesaro_grid(int nodes = 60) {
    std::vector<double> g;
    for (int i = 0; i < nodes; ++i)
        g.push_back(1e-4 * std::pow(4.0 / 1e-4, double(i) / double(nodes - 1)));
    return g;
}

// ---------------------------------------------------------------------------
// Multiscale dyadic bump synthesis: f = sum_j u_j^{1/q} 2^{-j(s - N/p)}
// psi(2^j (x - m_j)) with pairwise disjoint levels. The levels live on their
// own local grids (a global lattice would need 2^J K samples), and the shell
// diagnostics evaluate the profile in closed form, so every level is exact.

namespace detail {

inline double psi_bump(double t) { return gen::bump_profile(t); }

/// (int |Delta_{h'}^M psi|^p dx)^{1/p} on the profile's own scale, midpoint
/// rule at spacing 1/K over the full stencil window.
inline double psi_diff_norm(int M, double hprime, double p, int K = 64) {
    const double lo = -1.0 - double(M) * std::abs(hprime) - 0.5;
    const double hi = 1.5;
    const std::int64_t n = std::int64_t(std::ceil((hi - lo) * K));
    const auto c = diff_coeffs(M);
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = lo + (double(i) + 0.5) / double(K);
        double v = 0.0;
        for (int j = 0; j <= M; ++j) v += c[std::size_t(j)] * psi_bump(x + double(j) * hprime);
        acc += std::pow(std::abs(v), p);
    }
    return std::pow(acc / double(K), 1.0 / p);
}

/// Same integral restricted to |x| <= eps0: the profile-only constant of the
/// per-shell lower bound.
inline double psi_diff_norm_window(int M, double hprime, double p, double eps0, int K = 256) {
    const std::int64_t n = std::int64_t(std::ceil(2.0 * eps0 * K));
    const auto c = diff_coeffs(M);
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = -eps0 + (double(i) + 0.5) / double(K);
        double v = 0.0;
        for (int j = 0; j <= M; ++j) v += c[std::size_t(j)] * psi_bump(x + double(j) * hprime);
        acc += std::pow(std::abs(v), p);
    }
    return std::pow(acc / double(K), 1.0 / p);
}

/// p-th power of |Delta_h^M (amp psi((x-center)/scale))| integrated over a
/// window in x, midpoint rule; used by the level-locality diagnostic.
inline double level_window_power(double amp, double center, double scale, int M, double h,
                                 double p, double wlo, double whi, int K = 256) {
    const auto c = diff_coeffs(M);
    const std::int64_t n = std::int64_t(std::ceil((whi - wlo) / scale * K));
    const double dx = (whi - wlo) / double(n);
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = wlo + (double(i) + 0.5) * dx;
        double v = 0.0;
        for (int j = 0; j <= M; ++j)
            v += c[std::size_t(j)] * amp * psi_bump((x + double(j) * h - center) / scale);
        acc += std::pow(std::abs(v), p);
    }
    return acc * dx;
}

} // namespace detail

struct BumpLevel {
    int j = 0;            // dyadic level (nonzero u_j only, j = 2^k)
    double weight = 0.0;  // u_j
    double amplitude = 0.0;
    double center = 0.0;
    double scale = 0.0;  // 2^{-j}
    GridFunction local;
};

struct NonlimitShellRow {
    int j = 0;
    double u = 0.0;
    double local_value = 0.0;   // 2^{js} sup_{h in K_j} ||Delta_h^M f_j||_p, level j alone
    double full_value = 0.0;    // same sup through all levels
    double lower_bound = 0.0;   // frozen c * u_j^{1/q}
    double window_local = 0.0;  // norm over the half-support window around m_j, level j only
    double window_full = 0.0;   // same window, all levels summed (they vanish there)
};

struct DyadicBumpFunction {
    double s = 0.5, p = 2.0, q = 2.0;
    int M = 1, J = 10;
    double eta = 1.0;  // profile support radius
    std::vector<double> u;
    std::vector<BumpLevel> levels;
    std::vector<NonlimitShellRow> shells;       // one row per level j = 2^k <= J
    std::vector<double> quark_eps_grid;
    std::vector<double> quark_values;           // eps * sum_j u_j 2^{-j eps q}
    double quark_bound = 0.0;                   // 2 q^{-1} / (e ln 2)
    bool quark_within_bound = false;
    double profile_constant = 0.0;              // the frozen window constant c
};

/// Build the multiscale counterexample and its two diagnostic columns: the
/// bounded quark-side sums and the growing per-shell lower-bound series.
inline DyadicBumpFunction nonlimit_function(double s, double p, double q, int M, int J,
                                            int K = 64) {
    require(s > 0.0 && p >= 1.0 && q >= 1.0, "nonlimit_function: need s > 0, p, q >= 1");
    require(M >= 1 && M <= kMaxDiffOrder && s < double(M) + 1e-12,
            "nonlimit_function: need 1 <= M <= 6 and s <= M");
    require(J >= 2, "nonlimit_function: J must be >= 2");
    if (J > 14)
        throw precondition_error(
            "nonlimit_function: J > 14 rejected; level grids at spacing 2^{-J}/K fall below "
            "double-precision resolvability");

    DyadicBumpFunction f;
    f.s = s; f.p = p; f.q = q; f.M = M; f.J = J;
    f.eta = 1.0;
    f.u = cesaro_sequence(J);

    const double step = 2.0 * (double(M) + f.eta);  // m_j = 2 (M + eta) j
    for (int j = 1; j <= J; ++j) {
        if (f.u[std::size_t(j)] == 0.0) continue;
        BumpLevel lv{j,
                     f.u[std::size_t(j)],
                     std::pow(f.u[std::size_t(j)], 1.0 / q) * std::pow(2.0, -double(j) * (s - 1.0 / p)),
                     step * double(j),
                     std::pow(2.0, -double(j)),
                     GridFunction(1, {0, 0, 0}, 1.0, {2, 1, 1}, {0.0, 0.0})};
        const double sp = lv.scale / double(K);
        const double pad = (double(M) + 1.0) * lv.scale;
        Generator g;
        g.spec = "level";
        g.support = Box::interval(lv.center - lv.scale, lv.center + lv.scale);
        g.eval = [lv](const std::array<double, 3>& x) {
            return lv.amplitude * detail::psi_bump((x[0] - lv.center) / lv.scale);
        };
        lv.local = make_grid_function(g, Box::interval(lv.center - lv.scale - pad,
                                                       lv.center + lv.scale + pad),
                                      sp);
        f.levels.push_back(std::move(lv));
    }

    // disjointness: gap between consecutive level supports must be positive
    for (std::size_t a = 0; a + 1 < f.levels.size(); ++a) {
        const auto& L = f.levels[a];
        const auto& R = f.levels[a + 1];
        const double gap = (R.center - f.eta * R.scale) - (L.center + f.eta * L.scale);
        require(gap > 0.0, "nonlimit_function: level supports overlap");
    }

    // the frozen profile constant c (the window integral at eps0 = 0.1)
    double c0 = 0.0;
    for (int n = K / 2; n <= K; ++n)
        c0 = std::max(c0, detail::psi_diff_norm_window(M, double(n) / double(K), p, 0.1));
    f.profile_constant = c0;

    // shell series: sup over h in K_j = [2^{-(j+1)}, 2^{-j}], sampled on the
    // level's own lattice (h' = h 2^j runs over [1/2, 1] for every j)
    for (const auto& lv : f.levels) {
        NonlimitShellRow row;
        row.j = lv.j;
        row.u = lv.weight;
        double best_local = 0.0, best_full = 0.0;
        for (int n = K / 2; n <= K; ++n) {
            const double hprime = double(n) / double(K);
            // level k contributes amplitude_k 2^{-k/p} || Delta^M_{h 2^k} psi ||_p
            double full_p = 0.0, local_p = 0.0;
            for (const auto& lk : f.levels) {
                const double hk = hprime * std::pow(2.0, double(lk.j - lv.j));
                const double contrib =
                    lk.amplitude * std::pow(2.0, -double(lk.j) / p) *
                    detail::psi_diff_norm(M, hk, p, K);
                full_p += std::pow(contrib, p);
                if (lk.j == lv.j) local_p = std::pow(contrib, p);
            }
            best_local = std::max(best_local, std::pow(local_p, 1.0 / p));
            best_full = std::max(best_full, std::pow(full_p, 1.0 / p));
        }
        const double lift = std::pow(2.0, double(lv.j) * s);
        row.local_value = lift * best_local;
        row.full_value = lift * best_full;
        row.lower_bound = c0 * std::pow(lv.weight, 1.0 / q);
        // windowed locality: on |x - m_j| <= scale/2 every other level's
        // difference vanishes for shifts in K_j, so the window sees level j
        // alone; both columns are computed independently and must agree
        {
            const double h = lv.scale;  // outer edge of K_j
            const double wlo = lv.center - 0.5 * lv.scale;
            const double whi = lv.center + 0.5 * lv.scale;
            double full_pow = 0.0, local_pow = 0.0;
            for (const auto& lk : f.levels) {
                const double w =
                    detail::level_window_power(lk.amplitude, lk.center, lk.scale, M, h, p, wlo, whi);
                full_pow += w;
                if (lk.j == lv.j) local_pow = w;
            }
            row.window_local = std::pow(local_pow, 1.0 / p);
            row.window_full = std::pow(full_pow, 1.0 / p);
        }
        f.shells.push_back(row);
    }

    // quark side: eps ||f||^q <= eps sum_j u_j 2^{-j eps q} <= 2 q^{-1}/(e ln 2)
    f.quark_bound = 2.0 / (q * M_E * std::log(2.0));
    f.quark_eps_grid = default_cesaro_grid();
    f.quark_within_bound = true;
    for (double eps : f.quark_eps_grid) {
        std::vector<QuarkCoeff> lam;
        for (const auto& lv : f.levels)
            lam.push_back({{0}, lv.j, {0},
                           std::pow(lv.weight, 1.0 / q) * std::pow(2.0, -double(lv.j) * eps)});
        const double norm_q = std::pow(quark_sequence_norm(lam, 1.0, Lp::finite(p), Lp::finite(q)), q);
        f.quark_values.push_back(eps * norm_q);
        if (eps * norm_q > f.quark_bound * (1.0 + 1e-12)) f.quark_within_bound = false;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Concentrating sequences: bounded nonlocal energy without local compactness.

/// f_n(x) = n^{(M-s)/(Mp)} Phi(n^{(M-s)/M} x) on its own lattice; the spacings
/// are nested powers of two so the compactness probe can subsample exactly.
inline GridFunction noncompact_sequence(int M, double s, double p, double n) {
    require(n >= 1.0, "noncompact_sequence: n must be >= 1");
    require(M >= 1 && s > 0.0 && s < double(M), "noncompact_sequence: need 0 < s < M");
    require(p >= 1.0, "noncompact_sequence: p must be >= 1");
    const double expo = (double(M) - s) / double(M);
    const double sigma = std::pow(n, -expo);  // width scale
    const double amp = std::pow(n, expo / p);
    const double spacing = sigma / 256.0;
    // pad in whole lattice cells: margin for shifts up to M * (1/n) plus slack
    double L = sigma + std::ceil((double(M) / n * 1.25 + 0.25) / spacing) * spacing;
    // align the origin on quarter-integers where the lattice permits, so that
    // members with nested dyadic spacings share lattice points for the probe
    const double Lq = std::ceil(4.0 * L) / 4.0;
    if (std::abs((Lq - L) / spacing - std::round((Lq - L) / spacing)) < 1e-9) L = Lq;
    Generator g;
    g.spec = "concentrate";
    g.support = Box::interval(-sigma, sigma);
    g.eval = [amp, expo, n](const std::array<double, 3>& x) {
        return amp * detail::psi_bump(std::pow(n, expo) * x[0]);
    };
    return make_grid_function(g, Box::interval(-L, L), spacing);
}

struct BesovSequenceItem {
    GridFunction f;
    double n = 1.0;
    double functional = 0.0;  // int_{B_1} rho_n ||Delta_h^M f_n||_p^q / |h|^{sq} dh
};

/// The variant with the slowly-decaying power kernels rho_n: builds f_n with
/// the gamma-scaling and evaluates the diagnostic functional at eps = 1/n.
inline BesovSequenceItem noncompact_besov_sequence(int M, double s, double p, double q,
                                                   double gamma, double n) {
    require(q >= 1.0 && gamma >= 0.0 && gamma <= 1.0 / q + 1e-12,
            "noncompact_besov_sequence: need 0 <= gamma <= 1/q");
    require(M >= 1 && s > 0.0 && s < double(M), "noncompact_besov_sequence: need 0 < s < M");
    const double sigma = std::pow(n, -gamma / double(M));
    const double amp = std::pow(n, gamma / (double(M) * p));
    const double spacing = sigma / 256.0;
    // whole-cell padding covering the kernel reach of 1
    const std::int64_t pad_cells = std::int64_t(std::ceil((double(M) + 0.25) / spacing));
    const double L = sigma + double(pad_cells) * spacing;
    Generator g;
    g.spec = "concentrate-besov";
    g.support = Box::interval(-sigma, sigma);
    g.eval = [amp, sigma](const std::array<double, 3>& x) {
        return amp * detail::psi_bump(x[0] / sigma);
    };
    BesovSequenceItem item{make_grid_function(g, Box::interval(-L, L), spacing), n, 0.0};
    auto fam = mspow_family(1);
    item.functional =
        d_omega(item.f, fam, 1.0 / n, omega::pow(q), {s, Lp::finite(p), Lp::inf(), M}).value;
    return item;
}

struct CompactnessProbe {
    std::vector<std::vector<double>> distances;  // symmetric, zero diagonal
    double min_offdiag = 0.0;
};

/// All pairwise L^p distances over `region` after exact subsampling to the
/// coarsest common lattice; a lower-bounded minimum refutes local compactness.
inline CompactnessProbe compactness_probe(const std::vector<GridFunction>& seq, const Box& region,
                                          const Lp& p) {
    require(seq.size() >= 2, "compactness_probe: need at least two functions");
    CompactnessProbe out;
    const std::size_t n = seq.size();
    out.distances.assign(n, std::vector<double>(n, 0.0));
    out.min_offdiag = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double da = seq[a].spacing(), db = seq[b].spacing();
            const double ratio = std::max(da, db) / std::min(da, db);
            const double rr = std::round(ratio);
            require(std::abs(ratio - rr) < 1e-9 && (std::int64_t(rr) & (std::int64_t(rr) - 1)) == 0,
                    "compactness_probe: spacings are not nested powers of two");
            const GridFunction& coarse = da >= db ? seq[a] : seq[b];
            const GridFunction& fine = da >= db ? seq[b] : seq[a];
            const GridFunction fsub = subsample(fine, std::int64_t(rr));
            const double dist = lp_distance(coarse, fsub, p, region);
            out.distances[a][b] = out.distances[b][a] = dist;
            out.min_offdiag = std::min(out.min_offdiag, dist);
        }
    }
    return out;
}

} // namespace besovlab
