// medtest: command-line front end for the near-similar mediation test.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "medtest/boundary.hpp"
#include "medtest/envelope.hpp"
#include "medtest/error.hpp"
#include "medtest/io.hpp"
#include "medtest/mediation.hpp"
#include "medtest/monte_carlo.hpp"
#include "medtest/normal.hpp"
#include "medtest/optimize.hpp"
#include "medtest/parallel.hpp"
#include "medtest/rp.hpp"

using namespace medtest;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNumeric = 4;

std::string fmt(const char* arg, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, arg, v);
    return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

// "a:step:b" or "v1,v2,...".
std::vector<double> parse_grid(const std::string& arg) {
    std::vector<double> out;
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw Error(ErrorCode::usage, "bad number '" + s + "' in grid '" + arg + "'");
        return v;
    };
    if (arg.find(':') != std::string::npos) {
        const auto a = arg.find(':'), b = arg.find(':', a + 1);
        if (b == std::string::npos) throw Error(ErrorCode::usage, "grid range needs start:step:stop");
        const double lo = num(arg.substr(0, a)), step = num(arg.substr(a + 1, b - a - 1)), hi = num(arg.substr(b + 1));
        if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::usage, "grid range needs step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long k = 0; k <= n; ++k) out.push_back(lo + step * static_cast<double>(k));
        return out;
    }
    std::stringstream in(arg);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(num(item));
    if (out.empty()) throw Error(ErrorCode::usage, "empty grid");
    return out;
}

Noncentrality parse_point(const std::string& arg) {
    return Noncentrality::from_unordered(parse_grid(arg));
}

Boundary resolve_boundary(const std::string& arg, double alpha) {
    if (arg == "published") return published_optimal_boundary();
    if (arg == "lr") return lr_boundary(alpha);
    if (arg == "exact") return exact_similar_boundary(alpha);
    return load_boundary(arg);
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
    return out;
}

// Sets the worker count and records the common parameters of a run.
struct Common {
    std::size_t threads = 0;
    std::string out;

    void apply() const {
        if (threads > 0) set_default_threads(threads);
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--threads", c.threads, "worker threads (default: MEDTEST_THREADS or all cores)");
    cmd->add_option("--out", c.out, "write structured output to this file (plus a .manifest.json)");
}

void emit(const Common& c, RunManifest manifest, const std::string& body) {
    if (c.out.empty()) return;
    write_text(c.out, body);
    manifest.outputs.push_back(c.out);
    manifest.version = library_version();
    write_manifest(manifest, c.out);
}

void print_report(const TestReport& r) {
    std::string ts;
    for (double t : r.t_values) ts += fmt("%.4f ", t);
    std::printf("%-12s %-28s %-10s %-10s %s\n", r.test.c_str(), ts.c_str(),
                r.statistic ? fmt("%.5f", *r.statistic).c_str() : "-", fmt("%.5f", r.threshold).c_str(),
                r.rejected() ? "reject" : "accept");
}

// ---- test -------------------------------------------------------------

struct TestArgs {
    std::optional<double> t1, t2, t3;
    std::string data, y, m, x, controls;
    std::string boundary = "published";
    double alpha = 0.05;
    bool ml = false;
    Common common;
};

int run_test(const TestArgs& a) {
    a.common.apply();
    const bool have_t = a.t1 || a.t2 || a.t3;
    const bool have_data = !a.data.empty();
    if (have_t == have_data) throw Error(ErrorCode::usage, "give either --t1/--t2[/--t3] or --data with --y --m --x");
    RunManifest manifest{"test", {}, {}, {}, {}, {}};
    double t1 = 0.0, t2 = 0.0;
    std::optional<double> t3 = a.t3;
    if (have_data) {
        if (a.y.empty() || a.m.empty() || a.x.empty()) throw Error(ErrorCode::usage, "--data needs --y, --m and --x");
        std::vector<std::string> controls;
        if (!a.controls.empty()) {
            std::stringstream in(a.controls);
            std::string c;
            while (std::getline(in, c, ',')) controls.push_back(c);
        }
        const auto est = ols_mediation(mediation_data(read_csv(a.data), a.y, a.m, a.x, controls),
                                       a.ml ? VarianceConvention::ml : VarianceConvention::ols);
        t1 = est.t1;
        t2 = est.t2;
        std::printf("n=%zu theta1=%.6g theta2=%.6g tau=%.6g tau*=%.6g t1=%.4f t2=%.4f\n", est.n, est.theta1,
                    est.theta2, est.tau, est.tau_star, est.t1, est.t2);
        manifest.parameters = {{"data", a.data}, {"y", a.y}, {"m", a.m}, {"x", a.x}, {"controls", a.controls},
                               {"variance", a.ml ? "ml" : "ols"}};
    } else {
        if (!a.t1 || !a.t2) throw Error(ErrorCode::usage, "--t1 and --t2 are both required");
        t1 = *a.t1;
        t2 = *a.t2;
        manifest.parameters = {{"t1", g17(t1)}, {"t2", g17(t2)}};
        if (t3) manifest.parameters.emplace_back("t3", g17(*t3));
    }
    manifest.parameters.emplace_back("boundary", a.boundary);
    manifest.parameters.emplace_back("alpha", g17(a.alpha));

    std::vector<TestReport> reports;
    const Boundary boundary = resolve_boundary(a.boundary, a.alpha);
    if (t3) {
        const auto* g = std::get_if<GBoundary>(&boundary);
        if (g == nullptr) throw Error(ErrorCode::domain_error, "the three-dimensional test needs a linear boundary");
        reports.push_back(g_test_3d(t1, t2, *t3, *g));
    } else {
        reports.push_back(g_test(t1, t2, boundary));
        reports.push_back(lr_test(t1, t2, a.alpha));
        try {
            reports.push_back(sobel_wald_test(t1, t2, a.alpha));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::undefined_statistic) throw;
            std::printf("sobel undefined at t1 = t2 = 0\n");
        }
    }
    std::printf("%-12s %-28s %-10s %-10s %s\n", "test", "t-values", "statistic", "threshold", "decision");
    for (const auto& r : reports) print_report(r);

    std::string body = "[";
    for (std::size_t i = 0; i < reports.size(); ++i) body += (i ? ",\n " : "") + reports[i].to_json();
    body += "]\n";
    emit(a.common, manifest, body);
    return 0;
}

// ---- gval / table -----------------------------------------------------

int run_gval(const std::vector<double>& ts, const std::string& arg, double alpha) {
    const Boundary b = resolve_boundary(arg, alpha);
    for (double t : ts) std::printf("%.5g %.5f\n", t, eval(b, t));
    return 0;
}

int run_table(const std::string& arg, double alpha) {
    const Boundary b = resolve_boundary(arg, alpha);
    std::printf("t");
    for (int c = 0; c < 10; ++c) std::printf(" %7.2f", c / 100.0);
    std::printf("\n");
    for (int r = 0; r <= 21; ++r) {
        std::printf("%.1f", r / 10.0);
        for (int c = 0; c < 10; ++c) std::printf(" %.5f", eval(b, (10 * r + c) / 100.0));
        std::printf("\n");
    }
    return 0;
}

// ---- nrp / power ------------------------------------------------------

struct NrpArgs {
    std::string boundary = "published";
    std::string grid = "0:0.1:7.5";
    double alpha = 0.05;
    double tol = kDefaultRPTolerance;
    int dim = 2;
    std::string rule = "weighted";
    Common common;
};

int run_nrp(const NrpArgs& a) {
    a.common.apply();
    const auto grid = parse_grid(a.grid);
    RPGrid out;
    if (a.dim == 2) {
        out = nrp_curve(resolve_boundary(a.boundary, a.alpha), grid, a.tol, a.boundary);
    } else if (a.dim == 3) {
        const Boundary b = resolve_boundary(a.boundary, a.alpha);
        const auto* g = std::get_if<GBoundary>(&b);
        if (g == nullptr) throw Error(ErrorCode::domain_error, "the three-dimensional rule needs a linear boundary");
        if (a.rule != "weighted" && a.rule != "naive") throw Error(ErrorCode::usage, "--rule is weighted or naive");
        const Rule3D rule = a.rule == "naive" ? Rule3D::naive : Rule3D::weighted;
        out.boundary_id = a.boundary + "-3d-" + a.rule;
        out.values.resize(grid.size());
        out.errors.resize(grid.size());
        for (double m : grid) out.mu.push_back(Noncentrality({0.0, 0.0, m}));
        parallel_for(grid.size(), [&](std::size_t i) {
            const RPValue v = rejection_prob_3d(out.mu[i], a.tol, rule, *g);
            out.values[i] = v.value;
            out.errors[i] = v.error;
        });
    } else {
        throw Error(ErrorCode::usage, "--dim is 2 or 3");
    }
    std::printf("%-8s %-14s %s\n", "mu0", "nrp", "error");
    for (std::size_t i = 0; i < out.mu.size(); ++i) {
        std::printf("%-8.4g %-14.10f %.2g\n", out.mu[i].max(), out.values[i], out.errors[i]);
    }
    emit(a.common,
         {"nrp",
          {{"boundary", a.boundary}, {"grid", a.grid}, {"alpha", g17(a.alpha)}, {"dim", std::to_string(a.dim)},
           {"rule", a.rule}},
          {},
          {{"quadrature", a.tol}},
          {},
          {}},
         out.to_delimited());
    return 0;
}

struct PowerArgs {
    std::string test = "g";
    std::string boundary = "published";
    std::vector<std::string> points;
    std::string diagonal;
    std::string triangle;
    double alpha = 0.05;
    double tol = kDefaultRPTolerance;
    std::uint64_t draws = 0;
    std::uint64_t seed = 1;
    Common common;
};

int run_power(const PowerArgs& a) {
    a.common.apply();
    std::vector<Noncentrality> pts;
    for (const auto& p : a.points) pts.push_back(parse_point(p));
    if (!a.diagonal.empty()) {
        for (double m : parse_grid(a.diagonal)) pts.push_back(Noncentrality({m, m}));
    }
    if (!a.triangle.empty()) {
        const auto v = parse_grid(a.triangle);
        if (v.size() != 2) throw Error(ErrorCode::usage, "--triangle is step,max");
        for (auto& p : triangular_alt_grid(v[0], v[1])) pts.push_back(std::move(p));
    }
    if (pts.empty()) throw Error(ErrorCode::usage, "give --point, --diagonal or --triangle");
    for (const auto& p : pts) {
        if (p.size() != 2) throw Error(ErrorCode::usage, "power points are two-dimensional");
    }
    const double z = two_sided_critical_value(a.alpha);
    RPGrid out;
    DecisionRule rule;
    if (a.test == "g") {
        const Boundary b = resolve_boundary(a.boundary, a.alpha);
        out = rp_grid(b, pts, a.tol, a.boundary);
        rule = [b](std::span<const double> t) { return g_rejects(t[0], t[1], b); };
    } else if (a.test == "lr") {
        out = rp_grid(lr_boundary(a.alpha), pts, a.tol, "lr");
        rule = [z](std::span<const double> t) { return lr_rejects(t[0], t[1], z); };
    } else if (a.test == "wald") {
        out.mu = pts;
        out.boundary_id = "wald";
        for (const auto& p : pts) {
            const RPValue v = wald_rejection_prob(z * z, p, a.tol);
            out.values.push_back(v.value);
            out.errors.push_back(v.error);
        }
        rule = [z](std::span<const double> t) { return wald_rejects(t[0], t[1], z * z); };
    } else {
        throw Error(ErrorCode::usage, "--test is g, lr or wald");
    }
    std::printf("%-8s %-8s %-14s %s\n", "mu1", "mu2", "power", a.draws ? "mc (se)" : "error");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::string extra = fmt("%.2g", out.errors[i]);
        if (a.draws) {
            const auto mc = monte_carlo_rp(rule, pts[i].values(), a.draws, a.seed);
            extra = fmt("%.6f", mc.estimate) + fmt(" (%.6f)", mc.standard_error);
        }
        std::printf("%-8.4g %-8.4g %-14.10f %s\n", pts[i][0], pts[i][1], out.values[i], extra.c_str());
    }
    RunManifest manifest{"power",
                         {{"test", a.test}, {"boundary", a.boundary}, {"alpha", g17(a.alpha)}},
                         {},
                         {{"quadrature", a.tol}},
                         {},
                         {}};
    if (a.draws) {
        manifest.seeds.emplace_back("monte_carlo", a.seed);
        manifest.parameters.emplace_back("draws", std::to_string(a.draws));
    }
    emit(a.common, manifest, out.to_delimited());
    return 0;
}

// ---- exact --------------------------------------------------------------

int run_exact(double alpha, const Common& c) {
    const StepBoundary b = exact_similar_boundary(alpha);
    std::printf("%zu steps\n", b.steps().size() - 1);
    for (std::size_t j = 1; j < b.steps().size(); ++j) std::printf("c%zu %.10f\n", j, b.steps()[j]);
    emit(c, {"exact", {{"alpha", g17(alpha)}}, {}, {}, {}, {}}, serialize(b) + "\n");
    return 0;
}

// ---- envelope -----------------------------------------------------------

struct EnvelopeArgs {
    double cell = 0.05;
    double t_max = 6.0;
    std::size_t nulls = 20;
    double null_max = 6.0;
    double epsilon = 1e-5;
    double alpha = 0.05;
    bool nonsimilar = false;
    std::vector<std::string> points;
    std::string triangle = "0.2,4";
    std::string selection_out;
    Common common;
};

EnvelopeProblem make_problem(const EnvelopeArgs& a) {
    EnvelopeProblem p;
    p.t_max = a.t_max;
    p.cell_size = a.cell;
    p.null_points = null_grid(a.nulls, a.null_max);
    p.epsilon = a.epsilon;
    p.alpha = a.alpha;
    p.nonsimilar = a.nonsimilar;
    return p;
}

std::vector<Noncentrality> alt_points(const std::vector<std::string>& points, const std::string& triangle) {
    std::vector<Noncentrality> pts;
    for (const auto& p : points) pts.push_back(parse_point(p));
    if (pts.empty()) {
        const auto v = parse_grid(triangle);
        if (v.size() != 2) throw Error(ErrorCode::usage, "--triangle is step,max");
        pts = triangular_alt_grid(v[0], v[1]);
    }
    return pts;
}

int run_envelope(const EnvelopeArgs& a) {
    a.common.apply();
    EnvelopeProblem p = make_problem(a);
    const auto pts = alt_points(a.points, a.triangle);
    const EnvelopeSurface s = power_envelope(pts, p);
    std::printf("%-8s %-8s %-12s %-12s %s\n", "mu1", "mu2", "envelope", "rounded", "rounded-feasible");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::printf("%-8.4g %-8.4g %-12.8f %-12.8f %s\n", pts[i][0], pts[i][1], s.relaxed.values[i],
                    s.rounded.values[i], s.rounded_feasible[i] ? "yes" : "no");
    }
    RunManifest manifest{"envelope",
                         {{"cell", g17(a.cell)},
                          {"t_max", g17(a.t_max)},
                          {"nulls", std::to_string(a.nulls)},
                          {"null_max", g17(a.null_max)},
                          {"epsilon", g17(a.epsilon)},
                          {"alpha", g17(a.alpha)},
                          {"nonsimilar", a.nonsimilar ? "true" : "false"},
                          {"points", join(a.points)},
                          {"triangle", a.triangle}},
                         {},
                         {},
                         {},
                         {}};
    if (!a.common.out.empty()) {
        std::filesystem::path rounded = a.common.out;
        rounded += ".rounded.csv";
        write_text(rounded, s.rounded.to_delimited());
        manifest.outputs.push_back(rounded.string());
    }
    if (!a.selection_out.empty()) {
        if (pts.size() != 1) throw Error(ErrorCode::usage, "--selection-out needs exactly one --point");
        p.alt_point = pts.front();
        const auto r = point_optimal_cr(p);
        write_text(a.selection_out, selection_to_delimited(p, r.relaxed));
        manifest.outputs.push_back(a.selection_out);
    }
    emit(a.common, manifest, s.relaxed.to_delimited());
    return 0;
}

// ---- optimize -----------------------------------------------------------

struct OptimizeArgs {
    std::size_t knots = 16;
    std::size_t restarts = 8;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    std::size_t max_iterations = 200;
    double alpha = 0.05;
    bool optimal = false;
    double epsilon = 1e-5;
    std::string start;
    std::string envelope_file;
    EnvelopeArgs env;
    bool quiet = false;
    Common common;
};

int run_optimize(const OptimizeArgs& a) {
    a.common.apply();
    OptimizeConfig c;
    c.knots = a.knots;
    c.null_grid = default_null_grid();
    c.epsilon = a.epsilon;
    c.alpha = a.alpha;
    c.tol = a.tol;
    c.max_iterations = a.max_iterations;
    c.restarts = a.restarts;
    c.seed = a.seed;
    if (!a.quiet) {
        c.on_progress = [](const OptimizeLogEntry& e) {
            std::fprintf(stderr, "%-8s J=%-3zu it=%-4zu Q=%.4e eps=%.4e max=%.10f\n", e.phase.c_str(), e.knots,
                         e.iteration, e.q, e.epsilon, e.max_nrp);
        };
    }
    RunManifest manifest{"optimize",
                         {{"knots", std::to_string(a.knots)},
                          {"restarts", std::to_string(a.restarts)},
                          {"max_iterations", std::to_string(a.max_iterations)},
                          {"alpha", g17(a.alpha)},
                          {"optimal", a.optimal ? "true" : "false"}},
                         {{"restarts", a.seed}},
                         {{"quadrature", a.tol}},
                         {},
                         {}};
    OptimizeResult r;
    if (!a.optimal) {
        r = basic_varying_g(c);
    } else {
        RPGrid envelope;
        if (!a.envelope_file.empty()) {
            envelope = read_rp_grid(a.envelope_file);
            manifest.parameters.emplace_back("envelope", a.envelope_file);
        } else {
            EnvelopeProblem p = make_problem(a.env);
            p.epsilon = a.epsilon;
            envelope = power_envelope(alt_points(a.env.points, a.env.triangle), p).relaxed;
            manifest.parameters.emplace_back("envelope_cell", g17(a.env.cell));
            manifest.parameters.emplace_back("envelope_t_max", g17(a.env.t_max));
            manifest.parameters.emplace_back("envelope_nulls", std::to_string(a.env.nulls));
            manifest.parameters.emplace_back("envelope_points", join(a.env.points));
            manifest.parameters.emplace_back("envelope_triangle", a.env.triangle);
        }
        manifest.parameters.emplace_back("epsilon", g17(a.epsilon));
        manifest.parameters.emplace_back("start", a.start.empty() ? "basic" : a.start);
        std::optional<GBoundary> start;
        if (!a.start.empty()) {
            const Boundary b = resolve_boundary(a.start, a.alpha);
            const auto* g = std::get_if<GBoundary>(&b);
            if (g == nullptr) throw Error(ErrorCode::domain_error, "start boundary must be linear");
            start = *g;
        }
        r = optimal_varying_g(c, envelope, start ? &*start : nullptr);
        std::printf("max power gap to envelope %.6f\n", r.max_power_gap);
    }
    std::printf("epsilon %.6e  Q %.6e  max NRP %.12f  %s\n", r.epsilon, r.q,
                *std::max_element(r.nrp.begin(), r.nrp.end()), r.converged ? "converged" : "iteration limit");
    for (const auto& k : r.boundary.knots()) std::printf("%.6f %.6f\n", k.t, k.g);
    if (!a.common.out.empty()) {
        std::filesystem::path log = a.common.out;
        log += ".log.csv";
        write_text(log, log_to_delimited(r.log));
        manifest.outputs.push_back(log.string());
    }
    emit(a.common, manifest, serialize(r.boundary) + "\n");
    return 0;
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::usage:
            return kExitUsage;
        case ErrorCode::accuracy_failure:
        case ErrorCode::optimization_failure:
        case ErrorCode::infeasible_constraints:
            return kExitNumeric;
        default:
            return kExitDomain;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-similar tests for the no-mediation hypothesis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version());

    TestArgs test;
    auto* cmd_test = app.add_subcommand("test", "run the g-test with LR and Sobel for comparison");
    cmd_test->add_option("--t1", test.t1, "first t-ratio");
    cmd_test->add_option("--t2", test.t2, "second t-ratio");
    cmd_test->add_option("--t3", test.t3, "third t-ratio (three-dimensional test)");
    cmd_test->add_option("--data", test.data, "CSV file with a header row");
    cmd_test->add_option("--y", test.y, "outcome column");
    cmd_test->add_option("--m", test.m, "mediator column");
    cmd_test->add_option("--x", test.x, "treatment column");
    cmd_test->add_option("--controls", test.controls, "comma-separated control columns");
    cmd_test->add_flag("--ml", test.ml, "divide residual sums of squares by n");
    cmd_test->add_option("--boundary", test.boundary, "published, lr, exact or a boundary file");
    cmd_test->add_option("--alpha", test.alpha, "level");
    add_common(cmd_test, test.common);

    std::vector<double> gval_t;
    std::string gval_boundary = "published";
    double gval_alpha = 0.05;
    auto* cmd_gval = app.add_subcommand("gval", "print g(t)");
    cmd_gval->add_option("t", gval_t, "abscissae")->required();
    cmd_gval->add_option("--boundary", gval_boundary, "published, lr, exact or a boundary file");
    cmd_gval->add_option("--alpha", gval_alpha, "level");

    std::string table_boundary = "published";
    auto* cmd_table = app.add_subcommand("table", "print g(t) for t = 0, 0.01, ..., 2.19");
    cmd_table->add_option("--boundary", table_boundary, "published, lr, exact or a boundary file");

    NrpArgs nrp;
    auto* cmd_nrp = app.add_subcommand("nrp", "null rejection probabilities along mu = (0, mu0)");
    cmd_nrp->add_option("--boundary", nrp.boundary, "published, lr, exact or a boundary file");
    cmd_nrp->add_option("--grid", nrp.grid, "mu0 values, start:step:stop or a comma list");
    cmd_nrp->add_option("--alpha", nrp.alpha, "level");
    cmd_nrp->add_option("--tol", nrp.tol, "absolute quadrature tolerance");
    cmd_nrp->add_option("--dim", nrp.dim, "2, or 3 for mu = (0, 0, mu0)");
    cmd_nrp->add_option("--rule", nrp.rule, "three-dimensional rule: weighted or naive");
    add_common(cmd_nrp, nrp.common);

    PowerArgs power;
    auto* cmd_power = app.add_subcommand("power", "rejection probabilities at alternatives");
    cmd_power->add_option("--test", power.test, "g, lr or wald");
    cmd_power->add_option("--boundary", power.boundary, "boundary for the g-test");
    cmd_power->add_option("--point", power.points, "mu1,mu2 (repeatable)");
    cmd_power->add_option("--diagonal", power.diagonal, "mu1 = mu2 grid");
    cmd_power->add_option("--triangle", power.triangle, "step,max: mu1 <= mu2 grid");
    cmd_power->add_option("--alpha", power.alpha, "level");
    cmd_power->add_option("--tol", power.tol, "absolute quadrature tolerance");
    cmd_power->add_option("--mc", power.draws, "also estimate by Monte Carlo with this many draws");
    cmd_power->add_option("--seed", power.seed, "Monte Carlo seed");
    add_common(cmd_power, power.common);

    double exact_alpha = 0.05;
    Common exact_common;
    auto* cmd_exact = app.add_subcommand("exact", "build the exact similar step boundary");
    cmd_exact->add_option("--alpha", exact_alpha, "level; 1/alpha must be an integer");
    add_common(cmd_exact, exact_common);

    EnvelopeArgs env;
    auto* cmd_env = app.add_subcommand("envelope", "discretized power envelope");
    auto add_env_options = [](CLI::App* cmd, EnvelopeArgs& e) {
        cmd->add_option("--cell", e.cell, "cell size");
        cmd->add_option("--t-max", e.t_max, "upper edge of the finite cells");
        cmd->add_option("--nulls", e.nulls, "number of null points on [0, null-max]");
        cmd->add_option("--null-max", e.null_max, "largest null mu0");
        cmd->add_option("--point", e.points, "alternative mu1,mu2 (repeatable)");
        cmd->add_option("--triangle", e.triangle, "step,max alternative grid when no --point is given");
    };
    add_env_options(cmd_env, env);
    cmd_env->add_option("--epsilon", env.epsilon, "similarity slack");
    cmd_env->add_option("--alpha", env.alpha, "level");
    cmd_env->add_flag("--nonsimilar", env.nonsimilar, "drop the lower size constraints");
    cmd_env->add_option("--selection-out", env.selection_out, "write the relaxed cell selection (one --point)");
    add_common(cmd_env, env.common);

    OptimizeArgs opt;
    auto* cmd_opt = app.add_subcommand("optimize", "construct a near-similar boundary");
    cmd_opt->add_option("--knots", opt.knots, "largest number of free knots");
    cmd_opt->add_option("--restarts", opt.restarts, "perturbed restarts at the final knot count");
    cmd_opt->add_option("--seed", opt.seed, "restart seed");
    cmd_opt->add_option("--tol", opt.tol, "quadrature tolerance");
    cmd_opt->add_option("--max-iter", opt.max_iterations, "iterations per knot count");
    cmd_opt->add_option("--alpha", opt.alpha, "level");
    cmd_opt->add_flag("--optimal", opt.optimal, "maximize power against the envelope inside the epsilon band");
    cmd_opt->add_option("--epsilon", opt.epsilon, "similarity band for --optimal");
    cmd_opt->add_option("--start", opt.start, "starting boundary for --optimal (default: basic result)");
    cmd_opt->add_option("--envelope", opt.envelope_file, "envelope CSV from the envelope command");
    add_env_options(cmd_opt, opt.env);
    cmd_opt->add_flag("--quiet", opt.quiet, "no progress lines");
    add_common(cmd_opt, opt.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cmd_test) return run_test(test);
        if (*cmd_gval) return run_gval(gval_t, gval_boundary, gval_alpha);
        if (*cmd_table) return run_table(table_boundary, 0.05);
        if (*cmd_nrp) return run_nrp(nrp);
        if (*cmd_power) return run_power(power);
        if (*cmd_exact) {
            exact_common.apply();
            return run_exact(exact_alpha, exact_common);
        }
        if (*cmd_env) return run_envelope(env);
        if (*cmd_opt) return run_optimize(opt);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}
