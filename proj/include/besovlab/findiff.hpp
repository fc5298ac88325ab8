#pragma once

#include "besovlab/grid.hpp"

namespace besovlab {

/// Lattice-aligned shift: integer steps per axis at the target grid's spacing.
/// Restricting shifts to lattice vectors keeps every translate an index shift,
/// so difference norms carry no interpolation error.
struct LatticeShift {
    std::array<std::int64_t, 3> steps{0, 0, 0};
    double spacing = 0.0;

    static LatticeShift of(std::int64_t s0, double spacing) {
        return LatticeShift{{s0, 0, 0}, spacing};
    }
    static LatticeShift of2(std::int64_t s0, std::int64_t s1, double spacing) {
        return LatticeShift{{s0, s1, 0}, spacing};
    }

    bool zero() const { return steps[0] == 0 && steps[1] == 0 && steps[2] == 0; }

    /// Euclidean length |h|.
    double length() const {
        double s2 = 0.0;
        for (auto s : steps) s2 += double(s) * double(s);
        return spacing * std::sqrt(s2);
    }
};

inline constexpr int kMaxDiffOrder = 6;  // binomial alternation loses ~M digits

namespace detail {

inline void check_shift(const GridFunction& f, const LatticeShift& h, int M, bool enforce_margin) {
    require(M >= 1, "forward difference order M must be >= 1 (identity is not a difference)");
    require(M <= kMaxDiffOrder, "forward difference order M capped at 6");
    require(!h.zero(), "lattice shift must be nonzero");
    require(std::abs(h.spacing - f.spacing()) <= 1e-12 * f.spacing(),
            "shift spacing does not match the grid");
    if (!enforce_margin) return;
    for (int a = 0; a < f.dim(); ++a) {
        const std::int64_t s = h.steps[a];
        if (s == 0) continue;
        // support of Delta_h^M f extends M*|s| samples against the shift
        const std::int64_t room = s > 0 ? f.margin_lo(a) : f.margin_hi(a);
        if (room < M * std::llabs(s)) {
            std::ostringstream os;
            os << "zero margin violated on axis " << a << ": have " << room
               << " samples, need " << M * std::llabs(s) << " (= M*|h|/spacing)";
            throw precondition_error(os.str());
        }
    }
}

inline std::array<double, kMaxDiffOrder + 1> diff_coeffs(int M) {
    require(M >= 1 && M <= kMaxDiffOrder, "difference order out of range");
    std::array<double, kMaxDiffOrder + 1> c{};
    for (int j = 0; j <= M && j <= kMaxDiffOrder; ++j)
        c[std::size_t(j)] = ((M - j) % 2 ? -1.0 : 1.0) * binomial(M, j);
    return c;
}

} // namespace detail

/// M-th order forward difference, evaluated exactly on f's lattice using the
/// zero extension: (Delta_h^M f)(x) = sum_j (-1)^{M-j} C(M,j) f(x + j h).
/// With `enforce_margin` (default) the zero margin must cover M*|h| so the
/// output's support stays inside the box; pass false to inspect interior
/// values of functions without compact support.
inline GridFunction forward_difference(const GridFunction& f, const LatticeShift& h, int M,
                                       bool enforce_margin = true) {
    detail::check_shift(f, h, M, enforce_margin);
    M = std::min(M, kMaxDiffOrder);  // established by check_shift; aids the optimizer
    const auto c = detail::diff_coeffs(M);
    std::vector<double> out(static_cast<std::size_t>(f.size()));
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (std::int64_t fl = 0; fl < f.size(); ++fl) {
        double v = 0.0;
        for (int j = 0; j <= M; ++j) {
            const std::array<std::int64_t, 3> p{idx[0] + j * h.steps[0], idx[1] + j * h.steps[1],
                                                idx[2] + j * h.steps[2]};
            v += c[j] * f.value_at(p);
        }
        out[std::size_t(fl)] = v;
        for (int a = f.dim() - 1; a >= 0; --a) {
            if (++idx[a] < f.shape()[a]) break;
            idx[a] = 0;
        }
    }
    return GridFunction(f.dim(), f.origin(), f.spacing(), f.shape(), std::move(out));
}

/// ||Delta_h^M f||_{L^p} without materializing the difference grid.
inline double diff_lp_norm(const GridFunction& f, const LatticeShift& h, int M, const Lp& p) {
    detail::check_shift(f, h, M, true);
    M = std::min(M, kMaxDiffOrder);
    const auto c = detail::diff_coeffs(M);
    double acc = 0.0, mx = 0.0;
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (std::int64_t fl = 0; fl < f.size(); ++fl) {
        double v = 0.0;
        for (int j = 0; j <= M; ++j) {
            const std::array<std::int64_t, 3> q{idx[0] + j * h.steps[0], idx[1] + j * h.steps[1],
                                                idx[2] + j * h.steps[2]};
            v += c[j] * f.value_at(q);
        }
        if (p.is_inf) mx = std::max(mx, std::abs(v));
        else acc += detail::pow_p(v, p);
        for (int a = f.dim() - 1; a >= 0; --a) {
            if (++idx[a] < f.shape()[a]) break;
            idx[a] = 0;
        }
    }
    if (p.is_inf) return mx;
    const double cell = std::pow(f.spacing(), double(f.dim()));
    return ensure_finite(std::pow(cell * acc, 1.0 / p.p), "diff_lp_norm");
}

/// ||Delta_{k*spacing}^M f||_{L^p} for every k = 1..max_steps along axis 0,
/// specialized for 1D where the h-quadratures sample all lattice shifts.
/// profile[k-1] corresponds to h = k*spacing.
inline std::vector<double> diff_profile_1d(const GridFunction& f, int M, const Lp& p,
                                           std::int64_t max_steps) {
    require(f.dim() == 1, "diff_profile_1d: 1D grids only");
    require(max_steps >= 1, "diff_profile_1d: max_steps must be >= 1");
    detail::check_shift(f, LatticeShift::of(max_steps, f.spacing()), M, true);
    const auto c = detail::diff_coeffs(M);
    const auto& v = f.values();
    const std::int64_t n = f.size();
    std::vector<double> profile(static_cast<std::size_t>(max_steps));
    parallel_for(max_steps, [&](std::int64_t ki) {
        const std::int64_t k = ki + 1;
        double acc = 0.0, mx = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            double d = 0.0;
            for (int j = 0; j <= M; ++j) {
                const std::int64_t q = i + j * k;
                if (q < n) d += c[j] * v[std::size_t(q)];
            }
            if (p.is_inf) mx = std::max(mx, std::abs(d));
            else acc += detail::pow_p(d, p);
        }
        profile[std::size_t(ki)] =
            p.is_inf ? mx : std::pow(f.spacing() * acc, 1.0 / p.p);
    });
    for (double x : profile) ensure_finite(x, "diff_profile_1d");
    return profile;
}

} // namespace besovlab
