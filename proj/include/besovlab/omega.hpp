#pragma once

#include <memory>

#include "besovlab/common.hpp"

namespace besovlab {

/// Increasing modulus w: [0,inf) -> [0,inf) with w(0) = 0, w(t) -> inf, and a
/// rough-subadditivity constant A: w(t1+t2) <= A (w(t1) + w(t2)). A is exact
/// for the closed-form library entries (1 for concave forms, 2^{a-1} for
/// t^a with a >= 1, 2 for t*tanh(t)) and grid-estimated for compositions.
struct OmegaFn {
    std::string spec;
    std::function<double(double)> eval;
    double A = 1.0;
    bool A_exact = true;

    double operator()(double t) const { return eval(t); }
};

/// Default estimation grid: log-spaced over [1e-6, 1e6] plus t = 0 (the
/// degenerate pair realizes A = 1 for subadditive moduli exactly).
inline std::vector<double> omega_default_grid(int points_per_decade = 8) {
    std::vector<double> g;
    g.push_back(0.0);
    const int decades = 12;
    for (int i = 0; i <= decades * points_per_decade; ++i)
        g.push_back(std::pow(10.0, -6.0 + double(i) / points_per_decade));
    return g;
}

/// Smallest A consistent with the grid: max over grid pairs of
/// w(t1+t2)/(w(t1)+w(t2)). A lower bound on the true constant.
inline double subadditivity_constant(const OmegaFn& w, const std::vector<double>& grid) {
    require(!grid.empty(), "subadditivity_constant: empty grid");
    double pos_min = std::numeric_limits<double>::infinity();
    double pos_max = 0.0;
    for (double t : grid) {
        require(t >= 0.0, "subadditivity_constant: grid must be nonnegative");
        if (t > 0.0) { pos_min = std::min(pos_min, t); pos_max = std::max(pos_max, t); }
    }
    require(pos_max / pos_min >= 0.9e6, "subadditivity_constant: grid must cover >= 6 decades");
    // increasing on the grid (strictly, up to rounding)
    std::vector<double> sorted(grid);
    std::sort(sorted.begin(), sorted.end());
    double prev_t = -1.0, prev_v = -1.0;
    for (double t : sorted) {
        const double v = w(t);
        require(std::isfinite(v) && v >= 0.0, "subadditivity_constant: w not finite");
        if (prev_t >= 0.0 && t > prev_t * (1.0 + 1e-12))
            require(v > prev_v - 1e-14 * (1.0 + prev_v),
                    "subadditivity_constant: w is not increasing on the grid");
        prev_t = t; prev_v = v;
    }
    double A = 0.0;
    for (double t1 : sorted) {
        for (double t2 : sorted) {
            if (t1 + t2 <= 0.0) continue;
            const double den = w(t1) + w(t2);
            if (den <= 0.0) continue;
            A = std::max(A, w(t1 + t2) / den);
        }
    }
    return A;
}

namespace omega {

inline OmegaFn pow(double alpha) {
    require(alpha > 0.0, "omega pow: alpha must be positive");
    OmegaFn w;
    w.spec = "pow(" + std::to_string(alpha) + ")";
    w.eval = [alpha](double t) { return std::pow(t, alpha); };
    w.A = alpha <= 1.0 ? 1.0 : std::pow(2.0, alpha - 1.0);
    return w;
}

inline OmegaFn id() { auto w = pow(1.0); w.spec = "pow(1)"; return w; }

inline OmegaFn log1p() {
    OmegaFn w;
    w.spec = "log1p";
    w.eval = [](double t) { return std::log1p(t); };
    w.A = 1.0;  // concave
    return w;
}

inline OmegaFn ttanh() {
    OmegaFn w;
    w.spec = "ttanh";
    w.eval = [](double t) { return t * std::tanh(t); };
    w.A = 2.0;  // quadratic near 0, linear at infinity
    return w;
}

inline OmegaFn arsinh() {
    OmegaFn w;
    w.spec = "arsinh";
    w.eval = [](double t) { return std::asinh(t); };
    w.A = 1.0;  // concave
    return w;
}

/// w1 after w2; A is grid-estimated (reported as a lower bound).
inline OmegaFn compose(const OmegaFn& w1, const OmegaFn& w2) {
    OmegaFn w;
    w.spec = "comp(" + w1.spec + "," + w2.spec + ")";
    w.eval = [e1 = w1.eval, e2 = w2.eval](double t) { return e1(e2(t)); };
    w.A_exact = false;
    w.A = subadditivity_constant(w, omega_default_grid());
    return w;
}

} // namespace omega

/// Parse omega specs: pow(a), log1p, ttanh, arsinh, comp(f,g).
inline OmegaFn parse_omega_spec(const std::string& spec) {
    std::string s;
    for (char c : spec)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s == "log1p") return omega::log1p();
    if (s == "ttanh") return omega::ttanh();
    if (s == "arsinh") return omega::arsinh();
    if (s == "id") return omega::id();
    if (s.rfind("pow(", 0) == 0 && s.back() == ')')
        return omega::pow(std::stod(s.substr(4, s.size() - 5)));
    if (s.rfind("comp(", 0) == 0 && s.back() == ')') {
        const std::string inner = s.substr(5, s.size() - 6);
        int depth = 0;
        std::size_t split = std::string::npos;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            if (inner[i] == '(') ++depth;
            else if (inner[i] == ')') --depth;
            else if (inner[i] == ',' && depth == 0) { split = i; break; }
        }
        require(split != std::string::npos, "comp(f,g) needs two arguments");
        return omega::compose(parse_omega_spec(inner.substr(0, split)),
                              parse_omega_spec(inner.substr(split + 1)));
    }
    throw precondition_error("cannot parse omega spec '" + spec + "'");
}

// ---------------------------------------------------------------------------

/// Inner modulus with two-sided power bounds m1 t^p <= Omega(t) <= m2 t^p.
struct InnerOmega {
    std::string spec;
    std::function<double(double)> eval;
    double p = 1.0;
    double m1 = 1.0;
    double m2 = 1.0;

    double operator()(double t) const { return eval(t); }

    /// Verify the sandwich on a log grid over [1e-6, 1e6].
    void verify_sandwich() const {
        require(p >= 1.0, "InnerOmega: p must be >= 1");
        require(0.0 < m1 && m1 <= m2, "InnerOmega: need 0 < m1 <= m2");
        for (int i = 0; i <= 96; ++i) {
            const double t = std::pow(10.0, -6.0 + 0.125 * double(i));
            const double tp = std::pow(t, p);
            const double v = eval(t);
            require(v >= m1 * tp * (1.0 - 1e-12) && v <= m2 * tp * (1.0 + 1e-12),
                    "InnerOmega: sandwich bounds violated at t = " + std::to_string(t));
        }
        require(eval(0.0) == 0.0, "InnerOmega: Omega(0) must be 0");
    }

    static InnerOmega power(double p) {
        InnerOmega o;
        o.spec = "pow(" + std::to_string(p) + ")";
        o.p = p; o.m1 = 1.0; o.m2 = 1.0;
        o.eval = [p](double t) { return std::pow(t, p); };
        o.verify_sandwich();
        return o;
    }

    /// t^p (1 + e^{-t}) / 2: sandwiched between t^p/2 and t^p.
    static InnerOmega damped_power(double p) {
        InnerOmega o;
        o.spec = "dampedpow(" + std::to_string(p) + ")";
        o.p = p; o.m1 = 0.5; o.m2 = 1.0;
        o.eval = [p](double t) { return std::pow(t, p) * 0.5 * (1.0 + std::exp(-t)); };
        o.verify_sandwich();
        return o;
    }
};

} // namespace besovlab
