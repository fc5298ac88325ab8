#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace besovlab {

/// Thrown when an operation's preconditions are violated (bad parameters,
/// incompatible lattices, insufficient zero margin, ...).
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation produces a non-finite intermediate or the
/// requested quantity diverges.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw precondition_error(msg);
}

inline double ensure_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw numerical_error(std::string("non-finite value in ") + what);
    return v;
}

/// Lebesgue exponent: either finite p in [1, inf) or infinity.
struct Lp {
    bool is_inf = false;
    double p = 2.0;

    static Lp finite(double p) {
        require(p >= 1.0 && std::isfinite(p), "Lp exponent must satisfy 1 <= p < inf");
        return Lp{false, p};
    }
    static Lp inf() { return Lp{true, 0.0}; }

    bool operator==(const Lp& o) const {
        return is_inf == o.is_inf && (is_inf || p == o.p);
    }
    std::string str() const { return is_inf ? "inf" : std::to_string(p); }
};

/// Parse "inf" / "2" / "1.5" into an Lp exponent.
inline Lp parse_lp(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "infinity") return Lp::inf();
    try {
        return Lp::finite(std::stod(s));
    } catch (const std::invalid_argument&) {
        throw precondition_error("cannot parse Lp exponent '" + s + "'");
    }
}

/// Surface measure of the unit sphere S^{N-1}.
inline double sphere_measure(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw precondition_error("dim must be 1, 2 or 3");
    }
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * double(n - k + j) / double(j);
    return std::round(r);
}

// ---------------------------------------------------------------------------
// Thread pool scheduling. Results never depend on the thread count: every
// task writes its own slot and reductions run in index order.

namespace detail {
inline std::atomic<int>& thread_count() {
    static std::atomic<int> n{1};
    return n;
}
} // namespace detail

inline void set_threads(int n) { detail::thread_count() = n < 1 ? 1 : n; }
inline int threads() { return detail::thread_count().load(); }

/// Apply fn(i) for i in [0, n), possibly on several threads.
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    const int nt = std::min<std::int64_t>(threads(), n > 0 ? n : 1);
    if (nt <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Small numeric helpers shared by the quadrature code.

/// Exact integral of t^e over [a, b], 0 < a <= b (log form when e = -1).
inline double power_integral(double e, double a, double b) {
    if (b <= a) return 0.0;
    if (std::abs(e + 1.0) < 1e-13) return std::log(b / a);
    return (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}

namespace detail {
// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> gl8_x = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
     0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> gl8_w = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
} // namespace detail

/// Composite Gauss-Legendre integral of f over [a, b] with log-spaced panels
/// when a > 0 (integrands here are power-like), linear panels otherwise.
inline double integrate_panels(const std::function<double(double)>& f, double a, double b,
                               int panels_per_decade = 64) {
    if (b <= a) return 0.0;
    std::vector<double> edges;
    if (a > 0.0 && b / a > 1.0 + 1e-12) {
        const double la = std::log(a), lb = std::log(b);
        const int n = std::max(1, int(std::ceil((lb - la) / std::log(10.0) * panels_per_decade)));
        edges.resize(n + 1);
        for (int i = 0; i <= n; ++i) edges[i] = std::exp(la + (lb - la) * i / n);
    } else {
        const int n = 256;
        edges.resize(n + 1);
        for (int i = 0; i <= n; ++i) edges[i] = a + (b - a) * i / n;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double mid = 0.5 * (edges[k] + edges[k + 1]);
        const double half = 0.5 * (edges[k + 1] - edges[k]);
        double s = 0.0;
        for (int j = 0; j < 8; ++j) s += detail::gl8_w[j] * f(mid + half * detail::gl8_x[j]);
        sum += s * half;
    }
    return sum;
}

/// Least-squares line y = c0 + c1 x; returns {c0, c1}.
inline std::array<double, 2> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "linear_fit needs >= 2 points");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    require(std::abs(det) > 1e-300, "degenerate abscissae in linear_fit");
    return {(sy * sxx - sx * sxy) / det, (n * sxy - sx * sy) / det};
}

} // namespace besovlab
