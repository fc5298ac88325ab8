#pragma once

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>

#include "besovlab/counterexamples.hpp"

namespace besovlab::cli {

// Exit codes: 0 ok, 2 config parse, 3 precondition violation, 4 numerical.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitNumerical = 4;

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// RFC-4180 field quoting (our fields are plain, but keep the writer honest).
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
    os << "\n";
}

inline std::vector<double> parse_grid(const std::string& s) {
    // lo:hi[:N | :geomN]; default 10 nodes, linear
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == ':') { parts.push_back(cur); cur.clear(); }
        else cur += c;
    }
    parts.push_back(cur);
    require(parts.size() >= 2, "grid spec must look like lo:hi[:N|:geomN]: got '" + s + "'");
    const double lo = std::stod(parts[0]), hi = std::stod(parts[1]);
    bool geom = false;
    int n = 10;
    if (parts.size() >= 3) {
        std::string m = parts[2];
        if (m.rfind("geom", 0) == 0) {
            geom = true;
            m = m.substr(4);
        }
        if (!m.empty()) n = std::stoi(m);
    }
    require(n >= 2, "grid needs at least 2 nodes");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = double(i) / double(n - 1);
        g[std::size_t(i)] = geom ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    return g;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') { out.push_back(std::stod(cur)); cur.clear(); }
        else cur += c;
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    require(!out.empty(), "empty list '" + s + "'");
    return out;
}

/// Sample the named generator over an explicit or auto box (support plus pad,
/// snapped so the spacing divides the extent).
inline GridFunction build_grid(const std::string& fspec, const std::string& box_str,
                               double spacing, double pad) {
    auto g = parse_function_spec(fspec);
    Box box;
    box.dim = g.dim;
    if (!box_str.empty()) {
        const auto grid2 = parse_list(box_str);  // a,b per axis
        require(int(grid2.size()) == 2 * g.dim, "--box needs lo,hi per axis");
        for (int a = 0; a < g.dim; ++a) {
            box.lo[a] = grid2[std::size_t(2 * a)];
            box.hi[a] = grid2[std::size_t(2 * a + 1)];
        }
    } else {
        for (int a = 0; a < g.dim; ++a) {
            const double lo = std::isfinite(g.support.lo[a]) ? g.support.lo[a] : -4.0;
            const double hi = std::isfinite(g.support.hi[a]) ? g.support.hi[a] : 4.0;
            box.lo[a] = lo - pad;
            box.hi[a] = hi + pad;
        }
    }
    for (int a = 0; a < g.dim; ++a) {
        const double cells = std::ceil((box.hi[a] - box.lo[a]) / spacing - 1e-9);
        box.hi[a] = box.lo[a] + cells * spacing;
    }
    return make_grid_function(g, box, spacing);
}

struct EchoBuilder {
    std::string line;
    explicit EchoBuilder(const std::string& cmd) : line("# besovlab " + cmd) {}
    EchoBuilder& flag(const std::string& name, const std::string& v) {
        line += " --" + name + " " + v;
        return *this;
    }
    EchoBuilder& flag(const std::string& name, double v) { return flag(name, num(v)); }
    EchoBuilder& flag(const std::string& name, int v) { return flag(name, std::to_string(v)); }
};

inline void write_sweep_csv(std::ostream& os, const std::string& echo, const std::string& name,
                            const SweepReport& rep) {
    os << echo << "\n";
    csv_row(os, {"sweep", "name", "param", "value", "target", "relerr"});
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        const double tgt = rep.target.value_or(std::numeric_limits<double>::quiet_NaN());
        const double rel = rep.target && *rep.target != 0.0
                               ? std::abs(rep.values[i] - *rep.target) / std::abs(*rep.target)
                               : std::numeric_limits<double>::quiet_NaN();
        csv_row(os, {"sweep", name, num(rep.grid[i]), num(rep.values[i]), num(tgt), num(rel)});
    }
    csv_row(os, {"summary", name, rep.method, num(rep.extrapolated_limit),
                 num(rep.target.value_or(std::numeric_limits<double>::quiet_NaN())),
                 num(rep.relative_error.value_or(std::numeric_limits<double>::quiet_NaN()))});
}

} // namespace detail

/// Run the command line; returns a process exit status. All output paths are
/// deterministic for a fixed configuration and --threads 1.
inline int run(std::vector<std::string> args) {
    CLI::App app{"besovlab: fractional semi-norms and nonlocal functionals on grids"};
    app.require_subcommand(1);

    // shared knobs
    std::string fspec = "indicator(0,1)", box_str, kernel_spec = "uniform(r=1)",
                omega_spec = "pow(1)", out_path, config_path;
    double s = 0.5, p = 1.0, eps = 0.25, pad = 2.0, spacing = 1e-3, hmax = 0.0, href = 1.0;
    std::string q_str = "inf";
    int M = 1, threads = 1, kmin = 2, kmax = 10;
    bool dry_run = false;

    if (const char* env = std::getenv("BESOVLAB_THREADS")) threads = std::max(1, std::atoi(env));
    app.add_flag("--dry-run", dry_run, "parse, echo the canonical config line, and exit");
    app.add_option("--threads", threads, "worker threads (results are thread-count invariant)");

    // flat key=value config support: expand --config FILE into flags in place
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] != "--config") continue;
        if (i + 1 >= args.size()) {
            std::fprintf(stderr, "config error: --config needs a path\n");
            return kExitConfig;
        }
        std::ifstream cf(args[i + 1]);
        if (!cf.good()) {
            std::fprintf(stderr, "config error: cannot read '%s'\n", args[i + 1].c_str());
            return kExitConfig;
        }
        std::vector<std::string> expanded;
        std::string line;
        while (std::getline(cf, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
                line.pop_back();
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "config error: expected key=value, got '%s'\n", line.c_str());
                return kExitConfig;
            }
            expanded.push_back("--" + line.substr(0, eq));
            expanded.push_back(line.substr(eq + 1));
        }
        args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
        args.insert(args.begin() + long(i), expanded.begin(), expanded.end());
        break;
    }

    auto add_common = [&](CLI::App* sub, bool with_kernel) {
        sub->add_option("--f", fspec, "function spec, e.g. indicator(0,1)");
        sub->add_option("--box", box_str, "sampling box lo,hi (per axis)");
        sub->add_option("--spacing", spacing, "lattice spacing");
        sub->add_option("--pad", pad, "auto-box margin around the support");
        sub->add_option("--s", s, "smoothness");
        sub->add_option("--p", p, "integrability exponent");
        sub->add_option("--q", q_str, "summability exponent or 'inf'");
        sub->add_option("--M", M, "difference order");
        sub->add_option("--out", out_path, "output CSV path");
        if (with_kernel) {
            sub->add_option("--kernel", kernel_spec, "kernel family spec");
            sub->add_option("--omega", omega_spec, "outer modulus spec");
        }
    };

    auto* sc_semi = app.add_subcommand("seminorm", "Besov/Nikolskii semi-norm of a grid function");
    add_common(sc_semi, false);
    sc_semi->add_option("--hmax", hmax, "outer h radius (0 = margin-limited)");
    bool semi_tail = false;
    sc_semi->add_flag("--tail", semi_tail, "add the disjoint-translate far tail");

    auto* sc_dfunc = app.add_subcommand("dfunc", "nonlocal functional at a single eps");
    add_common(sc_dfunc, true);
    sc_dfunc->add_option("--epsilon", eps, "kernel scale");
    std::string inner_spec;
    sc_dfunc->add_option("--inner-omega", inner_spec, "inner modulus pow(p)/dampedpow(p)");

    auto* sc_bbm = app.add_subcommand("sweep-bbm", "first-order limit sweep r -> 1");
    add_common(sc_bbm, false);
    std::string rgrid_str;
    sc_bbm->add_option("--rgrid", rgrid_str, "lo:hi[:N|:geomN]");

    auto* sc_ms = app.add_subcommand("sweep-ms", "small-smoothness limit sweep r -> 0");
    add_common(sc_ms, false);
    sc_ms->add_option("--rgrid", rgrid_str, "lo:hi[:N|:geomN]");

    auto* sc_lip = app.add_subcommand("sweep-lip", "Lipschitz limit sweep r -> 1 at p = inf");
    add_common(sc_lip, false);
    sc_lip->add_option("--rgrid", rgrid_str, "lo:hi[:N|:geomN]");

    auto* sc_ratio = app.add_subcommand("theo-ratio", "d_omega / omega(seminorm) over an eps grid");
    add_common(sc_ratio, true);
    std::string egrid_str = "0.5:0.015625:geom6";
    sc_ratio->add_option("--egrid", egrid_str, "lo:hi[:N|:geomN]");

    auto* sc_decay = app.add_subcommand("approx-decay", "d_omega along eps = href 2^{-k}");
    add_common(sc_decay, true);
    sc_decay->add_option("--kmin", kmin, "first dyadic level");
    sc_decay->add_option("--kmax", kmax, "last dyadic level");
    sc_decay->add_option("--href", href, "reference scale");

    auto* sc_cx = app.add_subcommand("counterexample", "reproduce a counterexample family");
    std::string cx_kind = "nonlimit", nvals_str = "1,4,16,64,256";
    double gamma = 0.0, q_cx = 2.0;
    int J = 10;
    sc_cx->add_option("kind", cx_kind, "nonlimit | cesaro | noncompact | noncompact-besov");
    sc_cx->add_option("--s", s, "smoothness");
    sc_cx->add_option("--p", p, "integrability exponent");
    sc_cx->add_option("--q", q_cx, "summability exponent");
    sc_cx->add_option("--M", M, "difference order");
    sc_cx->add_option("--J", J, "level count");
    sc_cx->add_option("--gamma", gamma, "concentration exponent in [0, 1/q]");
    sc_cx->add_option("--nvals", nvals_str, "comma list of n values");
    sc_cx->add_option("--out", out_path, "output CSV path");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        std::vector<const char*> argv;
        argv.push_back("besovlab");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return kExitOk;  // --help
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    set_threads(threads);

    try {
        const Lp q = parse_lp(q_str);
        auto open_out = [&](const std::string& dflt) {
            if (out_path.empty()) out_path = dflt;
            auto os = std::make_unique<std::ofstream>(out_path);
            require(os->good(), "cannot open output path '" + out_path + "'");
            return os;
        };

        if (*sc_semi) {
            detail::EchoBuilder echo("seminorm");
            echo.flag("f", fspec).flag("s", s).flag("p", p).flag("q", q_str).flag("M", M)
                .flag("spacing", spacing).flag("pad", pad);
            if (!box_str.empty()) echo.flag("box", box_str);
            if (hmax > 0) echo.flag("hmax", hmax);
            if (semi_tail) echo.line += " --tail";
            if (!out_path.empty()) echo.flag("out", out_path);
            if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
            auto f = detail::build_grid(fspec, box_str, spacing, pad);
            auto os = open_out("seminorm.csv");
            *os << echo.line << "\n";
            detail::csv_row(*os, {"quantity", "s", "p", "q", "M", "epsilon", "value", "tolerance",
                                  "shell_argmax"});
            SemiNormSpec spec{s, Lp::finite(p), q, M};
            if (q.is_inf) {
                auto r = nikolskii_seminorm(f, spec, HQuadrature::dyadic(hmax));
                detail::csv_row(*os, {"nikolskii", detail::num(s), detail::num(p), q_str,
                                      std::to_string(M), "", detail::num(r.value), "",
                                      detail::num(r.argmax_h)});
                for (const auto& sh : r.shells)
                    detail::csv_row(*os, {"shell_sup", detail::num(sh.lo), detail::num(sh.hi), "",
                                          "", "", detail::num(sh.sup), "", detail::num(sh.argmax_h)});
                std::printf("nikolskii seminorm = %.6g (argmax |h| = %.4g)\n", r.value, r.argmax_h);
            } else {
                HQuadrature quad = HQuadrature::dyadic(hmax);
                quad.analytic_tail = semi_tail;
                auto r = besov_seminorm(f, spec, quad);
                detail::csv_row(*os, {"besov", detail::num(s), detail::num(p), q_str,
                                      std::to_string(M), "", detail::num(r.value),
                                      detail::num(r.core_bias), ""});
                for (const auto& sh : r.shells)
                    detail::csv_row(*os, {"shell", detail::num(sh.lo), detail::num(sh.hi), "", "",
                                          "", detail::num(sh.contribution), "", ""});
                std::printf("besov seminorm = %.6g (core %.3g, tail %.3g)\n", r.value, r.core_part,
                            r.tail_part);
            }
            return kExitOk;
        }

        if (*sc_dfunc) {
            detail::EchoBuilder echo("dfunc");
            echo.flag("f", fspec).flag("kernel", kernel_spec).flag("omega", omega_spec)
                .flag("s", s).flag("p", p).flag("M", M).flag("epsilon", eps)
                .flag("spacing", spacing).flag("pad", pad);
            if (!box_str.empty()) echo.flag("box", box_str);
            if (!inner_spec.empty()) echo.flag("inner-omega", inner_spec);
            if (!out_path.empty()) echo.flag("out", out_path);
            if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
            auto f = detail::build_grid(fspec, box_str, spacing, pad);
            auto fam = parse_kernel_family(kernel_spec, f.dim(), s);
            auto w = parse_omega_spec(omega_spec);
            DOmegaResult r;
            if (inner_spec.empty()) {
                r = d_omega(f, fam, eps, w, {s, Lp::finite(p), Lp::inf(), M});
            } else {
                InnerOmega inner = inner_spec.rfind("dampedpow", 0) == 0
                                       ? InnerOmega::damped_power(p)
                                       : InnerOmega::power(p);
                r = d_omega_inner(f, fam, eps, w, inner, s, M);
            }
            auto os = open_out("dfunc.csv");
            *os << echo.line << "\n";
            detail::csv_row(*os, {"quantity", "s", "p", "q", "M", "epsilon", "value", "tolerance",
                                  "shell_argmax"});
            detail::csv_row(*os, {"dfunc", detail::num(s), detail::num(p), "", std::to_string(M),
                                  detail::num(eps), detail::num(r.value), detail::num(r.tau), ""});
            for (const auto& sh : r.shells)
                detail::csv_row(*os, {"shell", detail::num(sh.lo), detail::num(sh.hi), "", "",
                                      detail::num(eps), detail::num(sh.contribution),
                                      detail::num(sh.mass), detail::num(sh.mean_arg)});
            std::printf("d_omega = %.6g (captured mass %.4f, tau %.3g)\n", r.value, r.captured_mass,
                        r.tau);
            return kExitOk;
        }

        auto run_sweep = [&](const char* name, const std::function<SweepReport()>& go,
                             detail::EchoBuilder echo) -> int {
            if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
            const auto rep = go();
            auto os = open_out(std::string(name) + ".csv");
            detail::write_sweep_csv(*os, echo.line, name, rep);
            std::printf("%s: extrapolated %.6g (%s)", name, rep.extrapolated_limit,
                        rep.method.c_str());
            if (rep.target) std::printf(", target %.6g, relerr %.3g", *rep.target,
                                        rep.relative_error.value_or(0.0));
            std::printf("\n");
            return kExitOk;
        };

        if (*sc_bbm) {
            detail::EchoBuilder echo("sweep-bbm");
            echo.flag("f", fspec).flag("p", p).flag("spacing", spacing).flag("pad", pad);
            if (!box_str.empty()) echo.flag("box", box_str);
            if (!rgrid_str.empty()) echo.flag("rgrid", rgrid_str);
            if (!out_path.empty()) echo.flag("out", out_path);
            auto grid = rgrid_str.empty() ? default_bbm_grid() : detail::parse_grid(rgrid_str);
            return run_sweep("sweep-bbm", [&] {
                auto f = detail::build_grid(fspec, box_str, spacing, pad);
                return bbm_sweep(f, p, grid, M);
            }, echo);
        }
        if (*sc_ms) {
            detail::EchoBuilder echo("sweep-ms");
            echo.flag("f", fspec).flag("p", p).flag("spacing", spacing).flag("pad", pad);
            if (!box_str.empty()) echo.flag("box", box_str);
            if (!rgrid_str.empty()) echo.flag("rgrid", rgrid_str);
            if (!out_path.empty()) echo.flag("out", out_path);
            auto grid = rgrid_str.empty() ? default_ms_grid() : detail::parse_grid(rgrid_str);
            return run_sweep("sweep-ms", [&] {
                auto f = detail::build_grid(fspec, box_str, spacing, pad);
                return ms_sweep(f, p, grid, M);
            }, echo);
        }
        if (*sc_lip) {
            detail::EchoBuilder echo("sweep-lip");
            echo.flag("f", fspec).flag("q", q_str).flag("spacing", spacing).flag("pad", pad);
            if (!box_str.empty()) echo.flag("box", box_str);
            if (!rgrid_str.empty()) echo.flag("rgrid", rgrid_str);
            if (!out_path.empty()) echo.flag("out", out_path);
            auto grid = rgrid_str.empty() ? default_lip_grid() : detail::parse_grid(rgrid_str);
            return run_sweep("sweep-lip", [&] {
                auto f = detail::build_grid(fspec, box_str, spacing, pad);
                return lip_sweep(f, parse_lp(q_str).p, grid, M);
            }, echo);
        }

        if (*sc_ratio) {
            detail::EchoBuilder echo("theo-ratio");
            echo.flag("f", fspec).flag("kernel", kernel_spec).flag("omega", omega_spec)
                .flag("s", s).flag("p", p).flag("M", M).flag("egrid", egrid_str)
                .flag("spacing", spacing).flag("pad", pad);
            if (!box_str.empty()) echo.flag("box", box_str);
            if (!out_path.empty()) echo.flag("out", out_path);
            if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
            auto f = detail::build_grid(fspec, box_str, spacing, pad);
            auto fam = parse_kernel_family(kernel_spec, f.dim(), s);
            auto w = parse_omega_spec(omega_spec);
            auto res = equivalence_ratio_sweep(f, fam, w, {s, Lp::finite(p), Lp::inf(), M},
                                               detail::parse_grid(egrid_str));
            auto os = open_out("theo-ratio.csv");
            detail::write_sweep_csv(*os, echo.line, "theo-ratio", res.sweep);
            detail::csv_row(*os, {"ratio", detail::num(res.ratio), "nikolskii",
                                  detail::num(res.nikolskii), "tau", detail::num(res.tau)});
            std::printf("sup ratio = %.4f (nikolskii %.6g, tau %.3g)\n", res.ratio, res.nikolskii,
                        res.tau);
            return kExitOk;
        }

        if (*sc_decay) {
            detail::EchoBuilder echo("approx-decay");
            echo.flag("f", fspec).flag("kernel", kernel_spec).flag("omega", omega_spec)
                .flag("s", s).flag("p", p).flag("M", M).flag("href", href).flag("kmin", kmin)
                .flag("kmax", kmax).flag("spacing", spacing).flag("pad", pad);
            if (!box_str.empty()) echo.flag("box", box_str);
            if (!out_path.empty()) echo.flag("out", out_path);
            if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
            auto f = detail::build_grid(fspec, box_str, spacing, pad);
            auto fam = parse_kernel_family(kernel_spec, f.dim(), s);
            auto w = parse_omega_spec(omega_spec);
            auto rep = approx_decay_sweep(f, fam, w, {s, Lp::finite(p), Lp::inf(), M}, href, kmin,
                                          kmax);
            auto os = open_out("approx-decay.csv");
            detail::write_sweep_csv(*os, echo.line, "approx-decay", rep);
            std::printf("decay ratio value(kmax)/value(kmin) = %.4g\n",
                        rep.values.back() / rep.values.front());
            return kExitOk;
        }

        if (*sc_cx) {
            detail::EchoBuilder echo("counterexample");
            echo.line += " " + cx_kind;
            if (cx_kind == "nonlimit") {
                echo.flag("s", s).flag("p", p).flag("q", q_cx).flag("M", M).flag("J", J);
                if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
                auto f = nonlimit_function(s, p, q_cx, M, J);
                auto os = open_out("counterexample-nonlimit.csv");
                *os << echo.line << "\n";
                detail::csv_row(*os, {"row", "j", "u", "shell_local", "shell_full", "lower_bound",
                                      "window_local", "window_full"});
                for (const auto& r : f.shells)
                    detail::csv_row(*os, {"level", std::to_string(r.j), detail::num(r.u),
                                          detail::num(r.local_value), detail::num(r.full_value),
                                          detail::num(r.lower_bound), detail::num(r.window_local),
                                          detail::num(r.window_full)});
                for (std::size_t i = 0; i < f.quark_eps_grid.size(); ++i)
                    detail::csv_row(*os, {"quark", detail::num(f.quark_eps_grid[i]),
                                          detail::num(f.quark_values[i]),
                                          detail::num(f.quark_bound), "", "", "", ""});
                std::printf("nonlimit: %zu levels, quark side %s the bound\n", f.shells.size(),
                            f.quark_within_bound ? "within" : "EXCEEDS");
                return f.quark_within_bound ? kExitOk : kExitNumerical;
            }
            if (cx_kind == "cesaro") {
                echo.flag("J", J);
                if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
                auto chk = cesaro_bound_check(J, default_cesaro_grid());
                auto os = open_out("counterexample-cesaro.csv");
                *os << echo.line << "\n";
                detail::csv_row(*os, {"eps", "value", "bound"});
                const auto grid = default_cesaro_grid();
                for (std::size_t i = 0; i < grid.size(); ++i)
                    detail::csv_row(*os, {detail::num(grid[i]), detail::num(chk.values[i]),
                                          detail::num(chk.bound)});
                std::printf("cesaro: sup %.6f at eps %.4g, bound %.6f\n", chk.sup, chk.arg_eps,
                            chk.bound);
                return chk.within_bound ? kExitOk : kExitNumerical;
            }
            if (cx_kind == "noncompact") {
                echo.flag("s", s).flag("p", p).flag("M", M).flag("nvals", nvals_str);
                if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
                auto fam = parse_kernel_family("uniform(r=1)", 1);
                std::vector<GridFunction> seq;
                auto os = open_out("counterexample-noncompact.csv");
                *os << echo.line << "\n";
                detail::csv_row(*os, {"n", "norm", "functional"});
                for (double n : detail::parse_list(nvals_str)) {
                    seq.push_back(noncompact_sequence(M, s, p, n));
                    const double nv = lp_norm(seq.back(), Lp::finite(p));
                    const double en = d_omega(seq.back(), fam, 1.0 / n, omega::pow(p),
                                              {s, Lp::finite(p), Lp::inf(), M})
                                          .value;
                    detail::csv_row(*os, {detail::num(n), detail::num(nv), detail::num(en)});
                }
                auto probe = compactness_probe(seq, Box::interval(-1, 1), Lp::finite(p));
                for (std::size_t a = 0; a < probe.distances.size(); ++a) {
                    std::vector<std::string> row = {"dist"};
                    for (double dv : probe.distances[a]) row.push_back(detail::num(dv));
                    detail::csv_row(*os, row);
                }
                std::printf("noncompact: min pairwise distance %.6g\n", probe.min_offdiag);
                return kExitOk;
            }
            if (cx_kind == "noncompact-besov") {
                echo.flag("s", s).flag("p", p).flag("q", q_cx).flag("M", M).flag("gamma", gamma)
                    .flag("nvals", nvals_str);
                if (dry_run) { std::printf("%s\n", echo.line.c_str()); return kExitOk; }
                auto os = open_out("counterexample-noncompact-besov.csv");
                *os << echo.line << "\n";
                detail::csv_row(*os, {"n", "norm", "functional"});
                std::vector<double> lx, ly;
                for (double n : detail::parse_list(nvals_str)) {
                    auto item = noncompact_besov_sequence(M, s, p, q_cx, gamma, n);
                    detail::csv_row(*os, {detail::num(n),
                                          detail::num(lp_norm(item.f, Lp::finite(p))),
                                          detail::num(item.functional)});
                    lx.push_back(std::log(n));
                    ly.push_back(std::log(item.functional));
                }
                const double slope = linear_fit(lx, ly)[1];
                detail::csv_row(*os, {"fit_exponent", detail::num(slope), "expected",
                                      detail::num(-(1.0 - gamma * q_cx))});
                std::printf("noncompact-besov: fitted exponent %.4f\n", slope);
                return kExitOk;
            }
            throw precondition_error("unknown counterexample kind '" + cx_kind + "'");
        }
        throw precondition_error("no subcommand selected");
    } catch (const precondition_error& e) {
        std::fprintf(stderr, "precondition violated: %s\n", e.what());
        return kExitPrecondition;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
}

} // namespace besovlab::cli
