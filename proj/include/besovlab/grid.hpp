#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "besovlab/common.hpp"

namespace besovlab {

/// Axis-aligned box in up to 3 dimensions.
struct Box {
    int dim = 1;
    std::array<double, 3> lo{0, 0, 0};
    std::array<double, 3> hi{0, 0, 0};

    static Box interval(double a, double b) { return Box{1, {a, 0, 0}, {b, 0, 0}}; }
    static Box rect(double ax, double bx, double ay, double by) {
        return Box{2, {ax, ay, 0}, {bx, by, 0}};
    }
    double extent(int axis) const { return hi[axis] - lo[axis]; }
};

/// Sampled real-valued function on a uniform lattice, identically zero
/// outside the sampled box. Immutable after construction.
class GridFunction {
public:
    GridFunction(int dim, std::array<double, 3> origin, double spacing,
                 std::array<std::int64_t, 3> shape, std::vector<double> values)
        : dim_(dim), origin_(origin), spacing_(spacing), shape_(shape), values_(std::move(values)) {
        require(dim_ >= 1 && dim_ <= 3, "GridFunction: dim must be in [1,3]");
        require(spacing_ > 0.0, "GridFunction: spacing must be positive");
        std::int64_t n = 1;
        for (int a = 0; a < dim_; ++a) {
            require(shape_[a] >= 2, "GridFunction: every shape entry must be >= 2");
            n *= shape_[a];
        }
        for (int a = dim_; a < 3; ++a) shape_[a] = 1;
        require(std::int64_t(values_.size()) == n, "GridFunction: values size does not match shape");
        max_abs_ = 0.0;
        for (double v : values_) {
            if (!std::isfinite(v)) throw precondition_error("GridFunction: non-finite sample");
            max_abs_ = std::max(max_abs_, std::abs(v));
        }
        compute_support_box();
    }

    int dim() const { return dim_; }
    double spacing() const { return spacing_; }
    const std::array<double, 3>& origin() const { return origin_; }
    const std::array<std::int64_t, 3>& shape() const { return shape_; }
    std::int64_t size() const { return std::int64_t(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    double max_abs() const { return max_abs_; }

    std::int64_t flat(std::array<std::int64_t, 3> idx) const {
        std::int64_t f = idx[0];
        for (int a = 1; a < dim_; ++a) f = f * shape_[a] + idx[a];
        return f;
    }

    bool inside(const std::array<std::int64_t, 3>& idx) const {
        for (int a = 0; a < dim_; ++a)
            if (idx[a] < 0 || idx[a] >= shape_[a]) return false;
        return true;
    }

    /// Sample value with the zero-extension contract.
    double value_at(std::array<std::int64_t, 3> idx) const {
        return inside(idx) ? values_[flat(idx)] : 0.0;
    }

    std::array<double, 3> coordinate(std::array<std::int64_t, 3> idx) const {
        std::array<double, 3> x{0, 0, 0};
        for (int a = 0; a < dim_; ++a) x[a] = origin_[a] + spacing_ * double(idx[a]);
        return x;
    }

    Box box() const {
        Box b;
        b.dim = dim_;
        for (int a = 0; a < dim_; ++a) {
            b.lo[a] = origin_[a];
            b.hi[a] = origin_[a] + spacing_ * double(shape_[a] - 1);
        }
        return b;
    }

    /// Zero margin (in samples) between the box face and the first sample
    /// classified as nonzero. Samples below 1e-14 * max|f| count as zero so
    /// that analytically decaying generators (Gaussian) have usable margins.
    std::int64_t margin_lo(int axis) const { return nz_lo_[axis]; }
    std::int64_t margin_hi(int axis) const { return shape_[axis] - 1 - nz_hi_[axis]; }

    /// Euclidean diameter of the bounding box of nonzero samples.
    double support_diameter() const {
        if (empty_support_) return 0.0;
        double d2 = 0.0;
        for (int a = 0; a < dim_; ++a) {
            const double e = spacing_ * double(nz_hi_[a] - nz_lo_[a]);
            d2 += e * e;
        }
        return std::sqrt(d2);
    }

    bool empty_support() const { return empty_support_; }

    /// New GridFunction with the values scaled by c.
    GridFunction scaled(double c) const {
        std::vector<double> v(values_);
        for (double& x : v) x *= c;
        return GridFunction(dim_, origin_, spacing_, shape_, std::move(v));
    }

private:
    void compute_support_box() {
        const double thresh = max_abs_ > 0.0 ? 1e-14 * max_abs_ : 0.0;
        for (int a = 0; a < 3; ++a) { nz_lo_[a] = shape_[a]; nz_hi_[a] = -1; }
        empty_support_ = true;
        std::array<std::int64_t, 3> idx{0, 0, 0};
        for (std::int64_t f = 0; f < size(); ++f) {
            if (std::abs(values_[f]) > thresh) {
                empty_support_ = false;
                for (int a = 0; a < dim_; ++a) {
                    nz_lo_[a] = std::min(nz_lo_[a], idx[a]);
                    nz_hi_[a] = std::max(nz_hi_[a], idx[a]);
                }
            }
            for (int a = dim_ - 1; a >= 0; --a) {
                if (++idx[a] < shape_[a]) break;
                idx[a] = 0;
            }
        }
        if (empty_support_)
            for (int a = 0; a < 3; ++a) { nz_lo_[a] = shape_[a] / 2; nz_hi_[a] = shape_[a] / 2; }
    }

    int dim_;
    std::array<double, 3> origin_;
    double spacing_;
    std::array<std::int64_t, 3> shape_;
    std::vector<double> values_;
    double max_abs_ = 0.0;
    std::array<std::int64_t, 3> nz_lo_{0, 0, 0}, nz_hi_{0, 0, 0};
    bool empty_support_ = true;
};

// ---------------------------------------------------------------------------
// Generators

/// Named closed-form function used to populate grids. `spec` is the canonical
/// spec string (re-parseable), `support` the analytic support bounding box
/// (may be infinite for decaying profiles).
struct Generator {
    std::string spec;
    int dim = 1;
    std::function<double(const std::array<double, 3>&)> eval;
    Box support;
    bool compact_support = true;
};

namespace gen {

inline double bump_profile(double t) {
    // exp(1 - 1/(1-t^2)) on (-1,1), zero outside; smooth, not a polynomial
    const double t2 = t * t;
    if (t2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t2));
}

inline Generator indicator(double a, double b) {
    require(a < b, "indicator: need a < b");
    Generator g;
    g.spec = "indicator(" + std::to_string(a) + "," + std::to_string(b) + ")";
    g.support = Box::interval(a, b);
    g.eval = [a, b](const std::array<double, 3>& x) { return (x[0] >= a && x[0] <= b) ? 1.0 : 0.0; };
    return g;
}

inline Generator tent(double center = 0.0, double halfwidth = 1.0, double amp = 1.0) {
    require(halfwidth > 0, "tent: halfwidth must be positive");
    Generator g;
    g.spec = "tent()";
    g.support = Box::interval(center - halfwidth, center + halfwidth);
    g.eval = [=](const std::array<double, 3>& x) {
        return amp * std::max(0.0, 1.0 - std::abs((x[0] - center) / halfwidth));
    };
    return g;
}

inline Generator bump(double center = 0.0, double radius = 1.0, double amp = 1.0) {
    require(radius > 0, "bump: radius must be positive");
    Generator g;
    g.spec = "bump()";
    g.support = Box::interval(center - radius, center + radius);
    g.eval = [=](const std::array<double, 3>& x) { return amp * bump_profile((x[0] - center) / radius); };
    return g;
}

inline Generator gaussian(double alpha = 1.0, double center = 0.0) {
    require(alpha > 0, "gaussian: alpha must be positive");
    Generator g;
    g.spec = "gaussian()";
    g.compact_support = false;
    const double inf = std::numeric_limits<double>::infinity();
    g.support = Box::interval(-inf, inf);
    g.eval = [=](const std::array<double, 3>& x) {
        const double d = x[0] - center;
        return std::exp(-alpha * d * d);
    };
    return g;
}

inline Generator trapezoid(double a = 0.0, double b = 1.0, double c = 2.0, double d = 3.0) {
    require(a < b && b <= c && c < d, "trapezoid: need a < b <= c < d");
    Generator g;
    g.spec = "trapezoid(" + std::to_string(a) + "," + std::to_string(b) + "," +
             std::to_string(c) + "," + std::to_string(d) + ")";
    g.support = Box::interval(a, d);
    g.eval = [=](const std::array<double, 3>& x) {
        const double t = x[0];
        if (t <= a || t >= d) return 0.0;
        if (t < b) return (t - a) / (b - a);
        if (t <= c) return 1.0;
        return (d - t) / (d - c);
    };
    return g;
}

inline Generator polybump(int k = 3) {
    require(k >= 1, "polybump: k must be >= 1");
    Generator g;
    g.spec = "polybump(" + std::to_string(k) + ")";
    g.support = Box::interval(-1.0, 1.0);
    g.eval = [k](const std::array<double, 3>& x) {
        const double u = 1.0 - x[0] * x[0];
        return u > 0.0 ? std::pow(u, double(k)) : 0.0;
    };
    return g;
}

inline Generator sinebump(double freq = 3.0) {
    Generator g;
    g.spec = "sinebump(" + std::to_string(freq) + ")";
    g.support = Box::interval(-1.0, 1.0);
    g.eval = [freq](const std::array<double, 3>& x) {
        return std::sin(2.0 * M_PI * freq * x[0]) * bump_profile(x[0]);
    };
    return g;
}

inline Generator cusp() {
    Generator g;
    g.spec = "cusp()";
    g.support = Box::interval(-1.0, 1.0);
    g.eval = [](const std::array<double, 3>& x) {
        const double u = 1.0 - std::sqrt(std::abs(x[0]));
        return u > 0.0 ? u : 0.0;
    };
    return g;
}

inline Generator staircase() {
    Generator g;
    g.spec = "staircase()";
    g.support = Box::interval(0.0, 2.5);
    g.eval = [](const std::array<double, 3>& x) {
        const double t = x[0];
        if (t < 0.0 || t > 2.5) return 0.0;
        if (t < 1.0) return 1.0;
        if (t < 2.0) return 2.0;
        return 0.5;
    };
    return g;
}

inline Generator twobumps() {
    Generator g;
    g.spec = "twobumps()";
    g.support = Box::interval(-2.5, 2.5);
    g.eval = [](const std::array<double, 3>& x) {
        return bump_profile(x[0] - 1.5) + 0.6 * bump_profile(x[0] + 1.5);
    };
    return g;
}

inline Generator trianglewave() {
    Generator g;
    g.spec = "trianglewave()";
    g.support = Box::interval(-1.5, 1.5);
    g.eval = [](const std::array<double, 3>& x) {
        auto t = [](double u) { return std::max(0.0, 1.0 - std::abs(u)); };
        return t(3.0 * (x[0] + 1.0)) - t(3.0 * x[0]) + t(3.0 * (x[0] - 1.0));
    };
    return g;
}

/// Polynomial sum c[k] x^k; unbounded support (margin checks must be waived).
inline Generator poly(std::vector<double> coeffs) {
    Generator g;
    std::ostringstream os;
    os << "poly(";
    for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? "," : "") << coeffs[i];
    os << ")";
    g.spec = os.str();
    g.compact_support = false;
    const double inf = std::numeric_limits<double>::infinity();
    g.support = Box::interval(-inf, inf);
    g.eval = [c = std::move(coeffs)](const std::array<double, 3>& x) {
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * x[0] + c[k];
        return v;
    };
    return g;
}

// 2D generators used by the planar tests.

inline Generator indicator2d(double ax, double bx, double ay, double by) {
    Generator g;
    g.dim = 2;
    g.spec = "indicator2d(" + std::to_string(ax) + "," + std::to_string(bx) + "," +
             std::to_string(ay) + "," + std::to_string(by) + ")";
    g.support = Box::rect(ax, bx, ay, by);
    g.eval = [=](const std::array<double, 3>& x) {
        return (x[0] >= ax && x[0] <= bx && x[1] >= ay && x[1] <= by) ? 1.0 : 0.0;
    };
    return g;
}

inline Generator bump2d(double radius = 1.0) {
    require(radius > 0, "bump2d: radius must be positive");
    Generator g;
    g.dim = 2;
    g.spec = "bump2d(" + std::to_string(radius) + ")";
    g.support = Box::rect(-radius, radius, -radius, radius);
    g.eval = [radius](const std::array<double, 3>& x) {
        return bump_profile(std::hypot(x[0], x[1]) / radius);
    };
    return g;
}

inline Generator gaussian2d(double alpha = 1.0) {
    Generator g;
    g.dim = 2;
    g.spec = "gaussian2d(" + std::to_string(alpha) + ")";
    g.compact_support = false;
    const double inf = std::numeric_limits<double>::infinity();
    g.support = Box::rect(-inf, inf, -inf, inf);
    g.eval = [alpha](const std::array<double, 3>& x) {
        return std::exp(-alpha * (x[0] * x[0] + x[1] * x[1]));
    };
    return g;
}

} // namespace gen

/// Parse a function spec string of the form name(p1,p2,...). Parameters are
/// positional numbers; whitespace is ignored.
Generator parse_function_spec(const std::string& spec);

// ---------------------------------------------------------------------------

/// Sample a generator onto a uniform lattice over `box`. `required_margin`
/// (length units) is the zero margin the caller's experiments need on every
/// face, typically M * h_max; pass 0 to waive the margin checks (generators
/// without compact support).
inline GridFunction make_grid_function(const Generator& g, const Box& box, double spacing,
                                       double required_margin = 0.0) {
    require(spacing > 0.0, "make_grid_function: spacing must be positive");
    require(box.dim == g.dim, "make_grid_function: box dim does not match generator dim");
    std::array<std::int64_t, 3> shape{1, 1, 1};
    for (int a = 0; a < box.dim; ++a) {
        const double cells = box.extent(a) / spacing;
        const double r = std::round(cells);
        require(r >= 1 && std::abs(cells - r) < 1e-9 * std::max(1.0, r),
                "make_grid_function: spacing must divide the box extent");
        shape[a] = std::int64_t(r) + 1;
    }
    if (required_margin > 0.0 && g.compact_support) {
        for (int a = 0; a < box.dim; ++a) {
            const double lo_room = g.support.lo[a] - box.lo[a];
            const double hi_room = box.hi[a] - g.support.hi[a];
            if (lo_room < required_margin - 1e-12 || hi_room < required_margin - 1e-12) {
                std::ostringstream os;
                os << "make_grid_function: support overflows box on axis " << a
                   << "; margin available (" << lo_room << ", " << hi_room
                   << ") < required " << required_margin;
                throw precondition_error(os.str());
            }
        }
    }
    std::int64_t n = 1;
    for (int a = 0; a < box.dim; ++a) n *= shape[a];
    std::vector<double> vals(static_cast<std::size_t>(n));
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (std::int64_t f = 0; f < n; ++f) {
        std::array<double, 3> x{0, 0, 0};
        for (int a = 0; a < box.dim; ++a) x[a] = box.lo[a] + spacing * double(idx[a]);
        vals[std::size_t(f)] = g.eval(x);
        for (int a = box.dim - 1; a >= 0; --a) {
            if (++idx[a] < shape[a]) break;
            idx[a] = 0;
        }
    }
    std::array<double, 3> origin{box.lo[0], box.lo[1], box.lo[2]};
    GridFunction out(box.dim, origin, spacing, shape, std::move(vals));
    if (required_margin > 0.0) {
        const auto need = std::int64_t(std::ceil(required_margin / spacing - 1e-9));
        for (int a = 0; a < box.dim; ++a) {
            if (out.margin_lo(a) < need || out.margin_hi(a) < need) {
                std::ostringstream os;
                os << "make_grid_function: sampled zero margin on axis " << a << " is ("
                   << out.margin_lo(a) << ", " << out.margin_hi(a) << ") samples, need " << need;
                throw precondition_error(os.str());
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// L^p machinery. All x-integrals use the translation-invariant rectangle rule
// spacing^dim * sum, so lattice-shift identities hold exactly.

namespace detail {
inline double pow_p(double v, const Lp& p) {
    const double a = std::abs(v);
    if (p.p == 1.0) return a;
    if (p.p == 2.0) return a * a;
    return std::pow(a, p.p);
}
} // namespace detail

inline double lp_norm(const GridFunction& f, const Lp& p) {
    if (p.is_inf) return f.max_abs();
    double s = 0.0;
    for (double v : f.values()) s += detail::pow_p(v, p);
    const double cell = std::pow(f.spacing(), double(f.dim()));
    return ensure_finite(std::pow(cell * s, 1.0 / p.p), "lp_norm");
}

namespace detail {
/// Integer lattice offset of g relative to f; rejects incompatible lattices.
inline std::array<std::int64_t, 3> lattice_offset(const GridFunction& f, const GridFunction& g) {
    require(f.dim() == g.dim(), "lattice mismatch: dims differ");
    require(std::abs(f.spacing() - g.spacing()) <= 1e-12 * f.spacing(),
            "lattice mismatch: spacings differ (no interpolation permitted)");
    std::array<std::int64_t, 3> off{0, 0, 0};
    for (int a = 0; a < f.dim(); ++a) {
        const double k = (g.origin()[a] - f.origin()[a]) / f.spacing();
        const double r = std::round(k);
        require(std::abs(k - r) < 1e-9,
                "lattice mismatch: origins not separated by a lattice vector");
        off[a] = std::int64_t(r);
    }
    return off;
}
} // namespace detail

/// || f - g ||_{L^p(region)} on the common lattice (exact subsampling only).
inline double lp_distance(const GridFunction& f, const GridFunction& g, const Lp& p,
                          const Box& region) {
    const auto off = detail::lattice_offset(f, g);
    require(region.dim == f.dim(), "lp_distance: region dim mismatch");
    std::array<std::int64_t, 3> ilo{0, 0, 0}, ihi{0, 0, 0};
    for (int a = 0; a < f.dim(); ++a) {
        ilo[a] = std::int64_t(std::ceil((region.lo[a] - f.origin()[a]) / f.spacing() - 1e-9));
        ihi[a] = std::int64_t(std::floor((region.hi[a] - f.origin()[a]) / f.spacing() + 1e-9));
        require(ihi[a] >= ilo[a], "lp_distance: empty region");
    }
    double s = 0.0, mx = 0.0;
    std::array<std::int64_t, 3> idx = ilo;
    for (;;) {
        const double fv = f.value_at(idx);
        std::array<std::int64_t, 3> gi{idx[0] - off[0], idx[1] - off[1], idx[2] - off[2]};
        const double d = fv - g.value_at(gi);
        if (p.is_inf) mx = std::max(mx, std::abs(d));
        else s += detail::pow_p(d, p);
        int a = f.dim() - 1;
        for (; a >= 0; --a) {
            if (++idx[a] <= ihi[a]) break;
            idx[a] = ilo[a];
        }
        if (a < 0) break;
    }
    if (p.is_inf) return mx;
    const double cell = std::pow(f.spacing(), double(f.dim()));
    return ensure_finite(std::pow(cell * s, 1.0 / p.p), "lp_distance");
}

/// Keep every k-th sample (exact coarsening; origin is preserved).
inline GridFunction subsample(const GridFunction& f, std::int64_t k) {
    require(k >= 1, "subsample: factor must be >= 1");
    if (k == 1) return f;
    std::array<std::int64_t, 3> shape{1, 1, 1};
    for (int a = 0; a < f.dim(); ++a) {
        shape[a] = (f.shape()[a] - 1) / k + 1;
        require(shape[a] >= 2, "subsample: resulting grid too small");
    }
    std::int64_t n = 1;
    for (int a = 0; a < f.dim(); ++a) n *= shape[a];
    std::vector<double> vals(static_cast<std::size_t>(n));
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (std::int64_t fl = 0; fl < n; ++fl) {
        vals[std::size_t(fl)] =
            f.value_at({idx[0] * k, idx[1] * k, idx[2] * k});
        for (int a = f.dim() - 1; a >= 0; --a) {
            if (++idx[a] < shape[a]) break;
            idx[a] = 0;
        }
    }
    return GridFunction(f.dim(), f.origin(), f.spacing() * double(k), shape, std::move(vals));
}

// ---------------------------------------------------------------------------
// Serialization: text format, one value per line after a self-describing
// header. CSV export gives (coordinate..., value) rows for plotting.

inline void write_gridfn(const GridFunction& f, std::ostream& os) {
    os << "gridfn v1 dim=" << f.dim() << " origin=";
    for (int a = 0; a < f.dim(); ++a) os << (a ? "," : "") << std::scientific << f.origin()[a];
    os << " spacing=" << std::scientific << f.spacing() << " shape=";
    for (int a = 0; a < f.dim(); ++a) os << (a ? "," : "") << f.shape()[a];
    os << "\n";
    char buf[40];
    for (double v : f.values()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        os << buf;
    }
}

inline GridFunction read_gridfn(std::istream& is) {
    std::string header;
    require(bool(std::getline(is, header)), "read_gridfn: missing header");
    std::istringstream hs(header);
    std::string magic, ver;
    hs >> magic >> ver;
    require(magic == "gridfn" && ver == "v1", "read_gridfn: bad magic");
    int dim = 0;
    std::array<double, 3> origin{0, 0, 0};
    double spacing = 0;
    std::array<std::int64_t, 3> shape{1, 1, 1};
    std::string tok;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') { out.push_back(cur); cur.clear(); }
            else cur += c;
        }
        out.push_back(cur);
        return out;
    };
    while (hs >> tok) {
        const auto eq = tok.find('=');
        require(eq != std::string::npos, "read_gridfn: malformed header field");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "dim") dim = std::stoi(val);
        else if (key == "spacing") spacing = std::stod(val);
        else if (key == "origin") {
            auto parts = split_list(val);
            for (std::size_t i = 0; i < parts.size() && i < 3; ++i) origin[i] = std::stod(parts[i]);
        } else if (key == "shape") {
            auto parts = split_list(val);
            for (std::size_t i = 0; i < parts.size() && i < 3; ++i) shape[i] = std::stoll(parts[i]);
        }
    }
    require(dim >= 1 && dim <= 3, "read_gridfn: bad dim");
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= shape[a];
    std::vector<double> vals;
    vals.reserve(std::size_t(n));
    std::string line;
    while (std::int64_t(vals.size()) < n && std::getline(is, line)) {
        if (line.empty()) continue;
        vals.push_back(std::stod(line));
    }
    require(std::int64_t(vals.size()) == n, "read_gridfn: truncated value list");
    return GridFunction(dim, origin, spacing, shape, std::move(vals));
}

inline void write_gridfn_csv(const GridFunction& f, std::ostream& os) {
    for (int a = 0; a < f.dim(); ++a) os << "x" << a << ",";
    os << "value\n";
    std::array<std::int64_t, 3> idx{0, 0, 0};
    char buf[40];
    for (std::int64_t fl = 0; fl < f.size(); ++fl) {
        const auto x = f.coordinate(idx);
        for (int a = 0; a < f.dim(); ++a) {
            std::snprintf(buf, sizeof buf, "%.12g,", x[a]);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.12g\n", f.values()[std::size_t(fl)]);
        os << buf;
        for (int a = f.dim() - 1; a >= 0; --a) {
            if (++idx[a] < f.shape()[a]) break;
            idx[a] = 0;
        }
    }
}

// ---------------------------------------------------------------------------

inline Generator parse_function_spec(const std::string& spec) {
    std::string s;
    for (char c : spec)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    const auto lp = s.find('(');
    require(lp != std::string::npos && s.back() == ')',
            "function spec must look like name(args): got '" + spec + "'");
    const std::string name = s.substr(0, lp);
    const std::string argstr = s.substr(lp + 1, s.size() - lp - 2);
    std::vector<double> args;
    if (!argstr.empty()) {
        std::string cur;
        for (char c : argstr) {
            if (c == ',') { args.push_back(std::stod(cur)); cur.clear(); }
            else cur += c;
        }
        args.push_back(std::stod(cur));
    }
    auto arg = [&](std::size_t i, double dflt) { return i < args.size() ? args[i] : dflt; };
    if (name == "indicator") return gen::indicator(arg(0, 0.0), arg(1, 1.0));
    if (name == "tent") return gen::tent(arg(0, 0.0), arg(1, 1.0), arg(2, 1.0));
    if (name == "bump") return gen::bump(arg(0, 0.0), arg(1, 1.0), arg(2, 1.0));
    if (name == "gaussian") return gen::gaussian(arg(0, 1.0), arg(1, 0.0));
    if (name == "trapezoid") return gen::trapezoid(arg(0, 0.0), arg(1, 1.0), arg(2, 2.0), arg(3, 3.0));
    if (name == "polybump") return gen::polybump(int(arg(0, 3.0)));
    if (name == "sinebump") return gen::sinebump(arg(0, 3.0));
    if (name == "cusp") return gen::cusp();
    if (name == "staircase") return gen::staircase();
    if (name == "twobumps") return gen::twobumps();
    if (name == "trianglewave") return gen::trianglewave();
    if (name == "indicator2d") return gen::indicator2d(arg(0, 0.0), arg(1, 1.0), arg(2, 0.0), arg(3, 1.0));
    if (name == "bump2d") return gen::bump2d(arg(0, 1.0));
    if (name == "gaussian2d") return gen::gaussian2d(arg(0, 1.0));
    throw precondition_error("unknown function generator '" + name + "'");
}

} // namespace besovlab
