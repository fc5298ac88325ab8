#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "besovlab/grid.hpp"

using namespace besovlab;

namespace {

// Independent rectangle-rule oracle at a resolution unrelated to the grid
// under test; used wherever an expected value comes from an integral.
double oracle_integral(const std::function<double(double)>& f, double a, double b,
                       long n = 2'000'000) {
    double s = 0.0;
    const double dx = (b - a) / double(n);
    for (long i = 0; i < n; ++i) s += f(a + (i + 0.5) * dx);
    return s * dx;
}

} // namespace

TEST_CASE("indicator sampling matches the definition") {
    auto f = make_grid_function(gen::indicator(0, 1), Box::interval(-2, 3), 1e-3, 1.0);
    CHECK(f.size() == 5001);
    CHECK(f.value_at({2000, 0, 0}) == 1.0);  // x = 0
    CHECK(f.value_at({3000, 0, 0}) == 1.0);  // x = 1
    CHECK(f.value_at({1999, 0, 0}) == 0.0);
    CHECK(f.value_at({3001, 0, 0}) == 0.0);
    CHECK(f.value_at({-5, 0, 0}) == 0.0);    // zero extension
    CHECK(f.value_at({9999, 0, 0}) == 0.0);
}

TEST_CASE("tent sampling: piecewise linear, peak 1 at center") {
    auto f = make_grid_function(gen::tent(), Box::interval(-2, 2), 1e-3, 0.5);
    CHECK(f.max_abs() == doctest::Approx(1.0));
    CHECK(f.value_at({2000, 0, 0}) == doctest::Approx(1.0));
    CHECK(f.value_at({2500, 0, 0}) == doctest::Approx(0.5));
    CHECK(f.value_at({500, 0, 0}) == 0.0);
}

TEST_CASE("smooth bump stays in [0,1] and vanishes outside (-1,1)") {
    auto f = make_grid_function(gen::bump(), Box::interval(-2, 2), 1e-3, 0.5);
    for (double v : f.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(f.value_at({999, 0, 0}) == 0.0);   // x just outside -1
    CHECK(f.value_at({2000, 0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("margin rejection carries a diagnostic") {
    CHECK_THROWS_AS(make_grid_function(gen::indicator(0, 1), Box::interval(-0.5, 1.2), 1e-2, 1.0),
                    precondition_error);
    CHECK_THROWS_AS(make_grid_function(gen::indicator(0, 1), Box::interval(-2, 3), -1.0),
                    precondition_error);
    CHECK_THROWS_AS(make_grid_function(gen::indicator(0, 1), Box::interval(-2, 3), 0.3),
                    precondition_error);  // spacing does not divide extent
}

TEST_CASE("lp_norm: indicator mass, tent sup, gaussian L2") {
    auto ind = make_grid_function(gen::indicator(0, 1), Box::interval(-2, 3), 1e-3, 1.0);
    CHECK(lp_norm(ind, Lp::finite(1)) == doctest::Approx(1.0).epsilon(2e-3));

    auto t = make_grid_function(gen::tent(), Box::interval(-2, 2), 1e-3, 0.5);
    CHECK(lp_norm(t, Lp::inf()) == 1.0);

    // ||e^{-x^2}||_2 = (pi/2)^{1/4}: the closed form and a high-resolution
    // rectangle oracle agree, and the grid value matches both.
    const double closed = std::pow(M_PI / 2.0, 0.25);
    const double orc = std::sqrt(
        oracle_integral([](double x) { return std::exp(-2.0 * x * x); }, -8.0, 8.0));
    CHECK(orc == doctest::Approx(closed).epsilon(1e-10));
    auto g = make_grid_function(gen::gaussian(), Box::interval(-8, 8), 1e-3, 1.0);
    CHECK(lp_norm(g, Lp::finite(2)) == doctest::Approx(1.11951).epsilon(1e-4));
    CHECK(lp_norm(g, Lp::finite(2)) == doctest::Approx(closed).epsilon(1e-5));
}

TEST_CASE("lp_norm homogeneity is exact to rounding") {
    auto f = make_grid_function(gen::bump(), Box::interval(-2, 2), 1e-2, 0.5);
    for (double c : {3.0, -0.125, 1e4}) {
        auto fc = f.scaled(c);
        for (auto p : {Lp::finite(1), Lp::finite(2), Lp::finite(3.5), Lp::inf()}) {
            CHECK(lp_norm(fc, p) == doctest::Approx(std::abs(c) * lp_norm(f, p)).epsilon(1e-13));
        }
    }
}

TEST_CASE("Hoelder monotonicity of discrete norms on a unit-measure support") {
    // tent with halfwidth 1/2: support [-1/2, 1/2] has measure 1, Lip = 2
    auto f = make_grid_function(gen::tent(0.0, 0.5), Box::interval(-1, 1), 1e-3, 0.25);
    const double slack = 2.0 * f.spacing() * 2.0;
    const double n1 = lp_norm(f, Lp::finite(1));
    const double n2 = lp_norm(f, Lp::finite(2));
    const double ni = lp_norm(f, Lp::inf());
    CHECK(n1 <= n2 + slack);
    CHECK(n2 <= ni + slack);
}

TEST_CASE("refinement convergence is first order for Lipschitz generators") {
    double prev = 0.0;
    std::vector<double> errs;
    const double ref = 2.0 / 3.0;  // || tent ||_2^2 = 2/3 exactly
    for (double sp : {4e-3, 2e-3, 1e-3}) {
        auto f = make_grid_function(gen::tent(), Box::interval(-2, 2), sp, 0.5);
        const double n2 = lp_norm(f, Lp::finite(2));
        errs.push_back(std::abs(n2 * n2 - ref));
        prev = n2;
    }
    (void)prev;
    CHECK(errs[0] <= 4.0 * 4e-3);
    CHECK(errs[2] <= errs[0]);  // shrinks under refinement
}

TEST_CASE("lp_distance: identity, disjoint indicators, incompatible lattices") {
    auto f = make_grid_function(gen::indicator(0, 1), Box::interval(-3, 3), 1e-3, 1.0);
    auto g = make_grid_function(gen::indicator(1, 2), Box::interval(-3, 3), 1e-3, 1.0);
    CHECK(lp_distance(f, f, Lp::finite(1), Box::interval(-3, 3)) == 0.0);
    CHECK(lp_distance(f, g, Lp::finite(1), Box::interval(-3, 3)) ==
          doctest::Approx(2.0).epsilon(2e-3));

    auto h = make_grid_function(gen::indicator(0, 1), Box::interval(-3, 3), 2e-3, 1.0);
    CHECK_THROWS_AS(lp_distance(f, h, Lp::finite(1), Box::interval(-3, 3)), precondition_error);

    // origins offset by half a spacing: rejected, no interpolation
    auto s = make_grid_function(gen::indicator(0, 1), Box::interval(-2.9995, 3.0005), 1e-3, 1.0);
    CHECK_THROWS_AS(lp_distance(f, s, Lp::finite(1), Box::interval(-2, 2)), precondition_error);
}

TEST_CASE("subsample keeps shared lattice points exactly") {
    auto f = make_grid_function(gen::tent(), Box::interval(-2, 2), 1e-3, 0.5);
    auto c = subsample(f, 4);
    CHECK(c.spacing() == doctest::Approx(4e-3));
    for (std::int64_t i = 0; i < c.size(); ++i)
        CHECK(c.values()[std::size_t(i)] == f.value_at({4 * i, 0, 0}));
}

TEST_CASE("serialization round-trips bit-exactly") {
    auto f = make_grid_function(gen::bump(), Box::interval(-2, 2), 1e-2, 0.5);
    std::stringstream ss;
    write_gridfn(f, ss);
    auto g = read_gridfn(ss);
    CHECK(g.dim() == f.dim());
    CHECK(g.spacing() == f.spacing());
    CHECK(g.shape() == f.shape());
    CHECK(g.values() == f.values());

    std::stringstream csv;
    write_gridfn_csv(f, csv);
    std::string first;
    std::getline(csv, first);
    CHECK(first == "x0,value");
}

TEST_CASE("2D grids: sampling, norms, distances") {
    auto f = make_grid_function(gen::indicator2d(0, 1, 0, 1), Box::rect(-1, 2, -1, 2), 1e-2, 0.5);
    CHECK(lp_norm(f, Lp::finite(1)) == doctest::Approx(1.0).epsilon(3e-2));
    CHECK(lp_norm(f, Lp::inf()) == 1.0);
    auto b = make_grid_function(gen::bump2d(), Box::rect(-2, 2, -2, 2), 2e-2, 0.5);
    CHECK(lp_norm(b, Lp::finite(2)) > 0.0);
    CHECK(lp_distance(b, b, Lp::finite(2), Box::rect(-2, 2, -2, 2)) == 0.0);
}

TEST_CASE("function spec strings parse and echo") {
    for (const char* s : {"indicator(0,1)", "tent()", "bump()", "gaussian()", "polybump(3)",
                          "trapezoid(0,1,2,3)", "sinebump(3)", "cusp()", "staircase()",
                          "twobumps()", "trianglewave()"}) {
        auto g = parse_function_spec(s);
        CHECK(g.dim == 1);
    }
    CHECK(parse_function_spec("indicator( 0 , 1 )").spec == parse_function_spec("indicator(0,1)").spec);
    CHECK_THROWS_AS(parse_function_spec("nosuch(1)"), precondition_error);
    CHECK_THROWS_AS(parse_function_spec("indicator"), precondition_error);
}

TEST_CASE("non-finite samples are rejected") {
    std::vector<double> vals(8, 0.0);
    vals[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(GridFunction(1, {0, 0, 0}, 0.1, {8, 1, 1}, vals), precondition_error);
}

TEST_CASE("3D grids: sampling and norms work through the generic paths") {
    Generator g;
    g.dim = 3;
    g.spec = "box3d";
    g.support = Box{3, {0, 0, 0}, {1, 1, 1}};
    g.eval = [](const std::array<double, 3>& x) {
        return (x[0] >= 0 && x[0] <= 1 && x[1] >= 0 && x[1] <= 1 && x[2] >= 0 && x[2] <= 1) ? 1.0
                                                                                            : 0.0;
    };
    Box box{3, {-1, -1, -1}, {2, 2, 2}};
    auto f = make_grid_function(g, box, 0.1, 0.5);
    CHECK(lp_norm(f, Lp::finite(1)) == doctest::Approx(1.0).epsilon(0.35));  // coarse lattice
    CHECK(lp_norm(f, Lp::inf()) == 1.0);
    std::stringstream ss;
    write_gridfn(f, ss);
    auto h = read_gridfn(ss);
    CHECK(h.values() == f.values());
    CHECK(h.dim() == 3);
}

TEST_CASE("2D serialization round-trips") {
    auto f = make_grid_function(gen::bump2d(), Box::rect(-2, 2, -2, 2), 0.05, 0.5);
    std::stringstream ss;
    write_gridfn(f, ss);
    auto g = read_gridfn(ss);
    CHECK(g.shape() == f.shape());
    CHECK(g.values() == f.values());
}
