// Command-line driver: solves, continues and verifies the radial and planar
// p-wave vortex problems, writing CSV profiles, JSON reports and a manifest.

#include "pwave/asymptotics.hpp"
#include "pwave/classical_gl.hpp"
#include "pwave/io.hpp"
#include "pwave/linearization.hpp"
#include "pwave/planar.hpp"
#include "pwave/pwave_solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pwave;

namespace {

const std::vector<std::string> kVerbs = {"classical", "solve",     "continue", "extend", "asym",
                                         "pohozaev",  "stability", "planar",   "sweep"};

struct Options {
    std::string config;
    std::string out = "out";
    int jobs = 1;
    long seed = 0;

    double R = 0.0;
    long N = 0;
    double t = 1.0;
    std::string t_range = "0:1:0.05";
    double tol = 1e-10;
    double dt = 0.05;
    double dt_min = 1e-4;
    int max_iters = 40;
    std::string bc = "asymptotic";

    double R_new = 0.0;
    long N_new = 0;

    bool no_fit = false;
    double delta = 0.02;

    long n_r = 160;
    long n_theta = 64;
    double nu = 0.0;
    double kappa = 1.0;
    std::string data = "vortex";
    double c_minus = 0.3;
    double c_plus = 0.7;
    double alpha = 2.0;
    double perturb = 0.0;
    double planar_tol = 1e-6;
    int planar_iters = 20000;
    bool coercivity = false;

    std::string R_values = "50,100";
    double nodes_per_unit = 100.0;
};

struct ValidationError {
    std::string field, message;
};

[[noreturn]] void invalid(const std::string& field, const std::string& message) { throw ValidationError{field, message}; }

struct TRange {
    double a, b, dt;
};

TRange parse_t_range(const std::string& s) {
    TRange r{};
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> r.a >> c1 >> r.b >> c2 >> r.dt) || c1 != ':' || c2 != ':' || !is.eof())
        invalid("t-range", "expected a:b:dt, got '" + s + "'");
    if (!(r.a >= 0.0 && r.a <= r.b && r.b <= 1.0)) invalid("t-range", "need 0 <= a <= b <= 1");
    if (!(r.dt > 0.0)) invalid("t-range", "step dt must be positive");
    return r;
}

std::vector<double> parse_list(const std::string& field, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            invalid(field, "cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) invalid(field, "list is empty");
    return out;
}

void check_grid(const Options& o) {
    if (!(std::isfinite(o.R) && o.R > 0.0)) invalid("R", "must be positive");
    if (o.N < 16) invalid("N", "must be >= 16 (got " + std::to_string(o.N) + ")");
}

void check_solver(const Options& o) {
    if (!(o.tol > 0.0)) invalid("tol", "must be positive");
    if (!(o.dt > 0.0)) invalid("dt", "must be positive");
    if (!(o.dt_min > 0.0 && o.dt_min <= o.dt)) invalid("dt-min", "need 0 < dt-min <= dt");
    if (o.max_iters <= 0) invalid("max-iters", "must be positive");
    if (o.bc != "asymptotic" && o.bc != "sharp") invalid("bc", "must be 'asymptotic' or 'sharp'");
}

void check_t(const Options& o) {
    if (!(o.t >= 0.0 && o.t <= 1.0)) invalid("t", "must lie in [0, 1]");
}

void validate(const std::string& verb, const Options& o) {
    if (o.jobs < 1) invalid("jobs", "must be >= 1");
    if (verb == "classical" || verb == "stability") {
        check_grid(o);
        if (!(o.tol > 0.0)) invalid("tol", "must be positive");
    } else if (verb == "solve" || verb == "pohozaev") {
        check_grid(o);
        check_solver(o);
        check_t(o);
        if (verb == "pohozaev" && o.t != 1.0) invalid("t", "the Pohozaev identity is checked at t = 1 only");
    } else if (verb == "continue") {
        check_grid(o);
        check_solver(o);
        parse_t_range(o.t_range);
    } else if (verb == "extend") {
        check_grid(o);
        check_solver(o);
        check_t(o);
        if (!(o.R_new > o.R)) invalid("R-new", "must exceed R");
        if (o.N_new < 16) invalid("N-new", "must be >= 16");
    } else if (verb == "asym") {
        check_t(o);
        if (!o.no_fit) {
            check_grid(o);
            check_solver(o);
            if (o.t == 0.0) invalid("t", "fit of f_+/t needs t > 0 (use --no-fit)");
        }
        if (!(o.delta > 0.0 && o.delta < 1.0 / 32.0)) invalid("delta", "must lie in (0, 1/32)");
    } else if (verb == "planar") {
        if (!(o.R > 0.0)) invalid("R", "must be positive");
        if (o.n_r < 16) invalid("Nr", "must be >= 16");
        if (o.n_theta < 32 || o.n_theta % 2 != 0) invalid("Ntheta", "must be even and >= 32");
        if (!(std::abs(o.nu) < 1.0)) invalid("nu", "must lie in (-1, 1)");
        if (!(o.kappa > 0.0)) invalid("kappa", "must be positive");
        if (o.data != "vortex" && o.data != "constant" && o.data != "affine")
            invalid("data", "must be 'vortex', 'constant' or 'affine'");
        if (!(o.planar_tol > 0.0)) invalid("planar-tol", "must be positive");
        if (o.planar_iters <= 0) invalid("planar-iters", "must be positive");
    } else if (verb == "sweep") {
        check_solver(o);
        parse_t_range(o.t_range);
        for (double R : parse_list("R-values", o.R_values))
            if (!(R > 0.0)) invalid("R-values", "radii must be positive");
        if (!(o.nodes_per_unit > 0.0)) invalid("nodes-per-unit", "must be positive");
    }
}

ContinuationConfig continuation_config(const Options& o, double t_end) {
    ContinuationConfig cfg;
    cfg.t_start = 0.0;
    cfg.t_end = t_end;
    cfg.dt_init = o.dt;
    cfg.dt_min = o.dt_min;
    cfg.newton_tol = o.tol;
    cfg.max_newton_iters = o.max_iters;
    cfg.bc = o.bc == "sharp" ? OuterBC::sharp : OuterBC::asymptotic;
    return cfg;
}

// Everything a pipeline hands back to the driver.
struct RunResult {
    json report = json::object();
    std::vector<std::string> outputs;
    bool invariants_ok = true;
};

// Carries a partial report out of a failed pipeline so it can be persisted.
struct PipelineFailure {
    std::string message;
    json report;
};

struct Context {
    Options opt;
    fs::path out;
    std::string hash;

    void emit(RunResult& r, const std::string& name, std::string_view content) const {
        write_text(out / name, content);
        r.outputs.push_back(name);
    }
};

double max_modulus2(const ProfilePair& p) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) m = std::max(m, p.fm[i] * p.fm[i] + p.fp[i] * p.fp[i]);
    return m;
}

json sign_report(const ProfilePair& p) {
    bool fp_neg = true, fm_in = true;
    for (std::size_t i = 1; i < p.grid.N(); ++i) {
        fp_neg = fp_neg && p.fp[i] < 0.0;
        fm_in = fm_in && p.fm[i] > 0.0 && p.fm[i] < 1.0;
    }
    return {{"f_plus_negative", fp_neg}, {"f_minus_in_0_1", fm_in}};
}

// Invariant block for a converged member of the radial family.
json member_checks(const ProfilePair& p, bool& ok) {
    const EnergyBreakdown e = energy_radial(p);
    const json signs = sign_report(p);
    const bool signs_hold = signs["f_plus_negative"].get<bool>() && signs["f_minus_in_0_1"].get<bool>();
    const double mod2 = max_modulus2(p);
    const double pot2 = 2.0 * e.potential;
    json j{{"t", p.t},
           {"signs", signs},
           {"signs_asserted", p.t > 0.0 && p.t <= 0.2},
           {"max_modulus2", mod2},
           {"potential_integral_2x", pot2},
           {"f_plus_sup", sup_norm(p.fp)},
           {"energy", to_json(e)}};
    bool pass = mod2 <= 3.0 + 1e-3 && pot2 <= 1.0 + 1e-3;
    if (signs_hold) pass = pass && mod2 <= 1.0 + 1e-3;
    if (p.t > 0.0 && p.t <= 0.2) pass = pass && signs_hold;
    j["passed"] = pass;
    ok = ok && pass;
    return j;
}

std::string t_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return buf;
}

SolutionFamily family_to(const RadialGrid& g, const Options& o, double t_end, json& report) {
    const ClassicalProfile c = solve_classical(g, std::min(o.tol, 1e-10));
    try {
        return continue_in_t(g, continuation_config(o, t_end), c);
    } catch (const ContinuationStalled& e) {
        json members = json::array();
        for (const auto& m : e.partial().members) members.push_back({{"t", m.t}, {"report", to_json(m.report)}});
        report["partial_family"] = members;
        throw PipelineFailure{e.what(), report};
    }
}

RunResult run_classical(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const RadialGrid g(o.R, static_cast<std::size_t>(o.N));
    const ClassicalProfile c = solve_classical(g, o.tol);
    bool inside = true, monotone = true;
    for (std::size_t i = 1; i < g.N(); ++i) inside = inside && c.f[i] > 0.0 && c.f[i] < 1.0;
    for (std::size_t i = 0; i < g.N(); ++i) monotone = monotone && c.f[i + 1] > c.f[i];
    const ProfilePair p = embed_classical(c);
    r.report["report"] = to_json(c.report);
    r.report["energy"] = to_json(energy_radial(p));
    r.report["outer_value"] = c.f[g.N()];
    r.report["invariants"] = {{"f_in_0_1", inside}, {"monotone", monotone}};
    r.invariants_ok = inside && monotone;
    if (o.R >= 20.0) r.report["tail_fit"] = to_json(fit_tail(p, 0.5 * o.R, 0.9 * o.R));
    ctx.emit(r, "classical.csv", profile_csv(p));
    return r;
}

RunResult run_solve(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const RadialGrid g(o.R, static_cast<std::size_t>(o.N));
    const SolutionFamily fam = family_to(g, o, o.t, r.report);
    const FamilyMember& m = fam.members.back();
    r.report["report"] = to_json(m.report);
    r.report["continuation_steps"] = fam.members.size() - 1;
    r.report["checks"] = member_checks(m.profile, r.invariants_ok);
    if (o.R >= 20.0 && g.N() >= 40)
        try {
            r.report["tail_fit"] = to_json(fit_tail(m.profile, 0.4 * o.R, 0.9 * o.R, m.t > 0.0));
        } catch (const Error& e) {
            r.report["tail_fit"] = {{"error", e.what()}};
        }
    ctx.emit(r, "solve.csv", profile_csv(m.profile));
    return r;
}

RunResult run_continue(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const TRange tr = parse_t_range(o.t_range);
    Options local = o;
    local.dt = tr.dt;
    local.dt_min = std::min(o.dt_min, tr.dt);
    const RadialGrid g(o.R, static_cast<std::size_t>(o.N));
    const ClassicalProfile c = solve_classical(g, std::min(o.tol, 1e-10));
    ContinuationConfig cfg = continuation_config(local, tr.b);
    cfg.t_start = tr.a;
    SolutionFamily fam;
    try {
        fam = continue_in_t(g, cfg, c);
    } catch (const ContinuationStalled& e) {
        fam = e.partial();
        r.report["stalled"] = e.what();
        r.invariants_ok = false;
    }
    json members = json::array();
    double prev_sup = -1.0;
    bool increasing = true;
    for (const auto& m : fam.members) {
        json j = member_checks(m.profile, r.invariants_ok);
        j["report"] = to_json(m.report);
        const std::string name = "family/t_" + t_tag(m.t) + ".csv";
        j["csv"] = name;
        ctx.emit(r, name, profile_csv(m.profile));
        const double s = sup_norm(m.profile.fp);
        increasing = increasing && s > prev_sup;
        prev_sup = s;
        members.push_back(std::move(j));
    }
    r.report["members"] = std::move(members);
    r.report["f_plus_sup_increasing"] = increasing;
    return r;
}

RunResult run_extend(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const RadialGrid g(o.R, static_cast<std::size_t>(o.N));
    const SolutionFamily fam = family_to(g, o, o.t, r.report);
    auto [p, rep] = extend_domain(fam.members.back().profile, o.R_new, static_cast<std::size_t>(o.N_new),
                                  continuation_config(o, o.t));
    r.report["report"] = to_json(rep);
    r.report["checks"] = member_checks(p, r.invariants_ok);
    ctx.emit(r, "extend.csv", profile_csv(p));
    return r;
}

RunResult run_asym(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const TailModel m = expansion_coefficients(o.t);
    r.report.update(to_json(m));
    r.report["coefficient_equations"] = coefficient_equations(m);
    json barrier;
    barrier["delta"] = o.delta;
    for (auto kind : {BarrierKind::super, BarrierKind::sub}) {
        const std::string key = kind == BarrierKind::super ? "validity_radius_super" : "validity_radius_sub";
        try {
            barrier[key] = find_validity_radius(o.t, o.delta, kind, 1.0, 1e4);
        } catch (const Error& e) {
            barrier[key] = nullptr;
            barrier[key + "_error"] = e.what();
        }
    }
    r.report["barrier"] = barrier;
    if (!o.no_fit) {
        const RadialGrid g(o.R, static_cast<std::size_t>(o.N));
        const SolutionFamily fam = family_to(g, o, o.t, r.report);
        const ProfilePair& p = fam.members.back().profile;
        const TailFit f = fit_tail(p, 0.4 * o.R, 0.9 * o.R, true);
        const json fj = to_json(f);
        for (auto it = fj.begin(); it != fj.end(); ++it) r.report[it.key()] = it.value();
        r.report["residuals"] = {{"minus", f.residual_minus}, {"plus", f.residual_plus}};
        if (o.R >= 50.0) r.report["derivative_tail"] = to_json(derivative_tail_check(p));
    }
    return r;
}

RunResult run_pohozaev(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const RadialGrid g(o.R, static_cast<std::size_t>(o.N));
    const SolutionFamily fam = family_to(g, o, 1.0, r.report);
    const PohozaevReport pr = pohozaev_residual(fam.members.back().profile);
    r.report["pohozaev"] = to_json(pr);
    std::string csv = "r,mismatch\n";
    char buf[64];
    for (std::size_t i = 0; i < pr.r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", pr.r[i], pr.mismatch[i]);
        csv += buf;
    }
    ctx.emit(r, "pohozaev.csv", csv);
    return r;
}

RunResult run_stability(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const RadialGrid g(o.R, static_cast<std::size_t>(o.N));
    const ClassicalProfile c = solve_classical(g, o.tol);
    const double lm = smallest_eigenvalue(l_minus(c));
    const double lp = smallest_eigenvalue(l_plus(c));
    const HSolution h = solve_h(c);
    r.report["lambda_min_Lminus"] = lm;
    r.report["lambda_min_Lplus"] = lp;
    r.report["h_min"] = h.h_min;
    r.report["h_prime_0"] = h.h_prime_0;
    r.report["g2_estimate"] = h.g2_estimate;
    r.report["h_residual"] = h.report.final_residual;
    r.report["h_negative_interior"] = h.negative_interior;
    r.invariants_ok = lm > 0.0 && lp > 0.0 && h.negative_interior && h.h_prime_0 < 0.0;
    ctx.emit(r, "h.csv", h_csv(h));
    return r;
}

RunResult run_planar(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const DiskGrid g(o.R, static_cast<std::size_t>(o.n_r), static_cast<std::size_t>(o.n_theta));
    std::vector<cplx> gm(g.n_theta()), gp(g.n_theta());
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        const cplx z = std::polar(o.R, g.theta(j));
        if (o.data == "vortex") {
            gm[j] = std::polar(1.0, -g.theta(j));
        } else if (o.data == "constant") {
            gm[j] = o.c_minus;
            gp[j] = o.c_plus;
        } else {
            gp[j] = o.c_plus + o.alpha * z;
            gm[j] = o.c_minus - o.alpha * std::conj(z);
        }
    }
    const KernelCheck kc = kernel_check(gm, gp, o.R);
    r.report["kernel_check"] = {{"kernel_form", kc.kernel_form},
                                {"alpha", {kc.alpha.real(), kc.alpha.imag()}},
                                {"defect", kc.defect}};

    PlanarConfig cfg;
    cfg.tol = o.planar_tol;
    cfg.max_iters = o.planar_iters;
    PlanarField init = PlanarField::zeros(g);
    const PlanarField* init_ptr = nullptr;
    if (o.perturb != 0.0) {
        // harmonic start plus a fixed non-equivariant bump
        init = sample_field(
            g,
            [&](double x, double y) {
                const double rr = std::hypot(x, y);
                return o.perturb * std::sin(std::numbers::pi * rr / o.R) * std::polar(1.0, 2.0 * std::atan2(y, x));
            },
            [&](double x, double y) {
                const double rr = std::hypot(x, y);
                return o.perturb * std::sin(std::numbers::pi * rr / o.R) * std::polar(1.0, -std::atan2(y, x));
            });
        for (std::size_t k = 0; k < g.num_nodes(); ++k) {
            const double rho = g.r(g.ring_of(k)) / o.R;
            const double th = g.theta(g.angle_of(k));
            if (o.data == "vortex") init.eta_minus[k] += rho * std::polar(1.0, -th);
            if (o.data == "constant") {
                init.eta_minus[k] += o.c_minus;
                init.eta_plus[k] += o.c_plus;
            }
        }
        init_ptr = &init;
    }

    try {
        const PlanarResult res = minimize_planar(g, gm, gp, o.nu, o.kappa, cfg, init_ptr);
        r.report["report"] = to_json(res.report);
        r.report["energy_trace"] = res.energy_trace;
        r.report["fourier"] = to_json(res.fourier);
        const PlanarEnergy e = planar_energy(res.field, o.nu, o.kappa);
        r.report["energy"] = {{"kinetic", e.kinetic}, {"potential", e.potential}, {"total", e.total}};
        bool monotone = true;
        for (std::size_t k = 1; k < res.energy_trace.size(); ++k)
            monotone = monotone && res.energy_trace[k] <= res.energy_trace[k - 1] * (1.0 + 1e-14) + 1e-300;
        r.report["energy_monotone"] = monotone;
        r.invariants_ok = monotone;
        if (o.data == "vortex" && o.nu == 0.0 && o.kappa == 1.0) {
            Options ro = o;
            ro.bc = "sharp";
            const auto N = static_cast<std::size_t>(10 * o.n_r);
            const RadialGrid rg(o.R, N);
            json scratch;
            const SolutionFamily fam = family_to(rg, ro, 1.0, scratch);
            const ProfilePair& p = fam.members.back().profile;
            const PlanarField emb = embed_radial(g, p);
            r.report["radial_comparison"] = {{"relative_l2", relative_l2_difference(res.field, emb)},
                                             {"radial_energy_times_2pi", 2.0 * std::numbers::pi * energy_radial(p).total},
                                             {"embedded_planar_energy", planar_energy(emb, 0.0, 1.0).total}};
        }
        ctx.emit(r, "planar.csv", planar_csv(res.field));
    } catch (const SolverFailure& e) {
        r.report["report"] = to_json(e.report());
        throw PipelineFailure{e.what(), r.report};
    }
    if (o.coercivity) r.report["coercivity"] = coercivity_estimate(g, o.nu);
    return r;
}

RunResult run_sweep(const Context& ctx) {
    const Options& o = ctx.opt;
    RunResult r;
    const TRange tr = parse_t_range(o.t_range);
    const std::vector<double> radii = parse_list("R-values", o.R_values);
    std::vector<double> ts;
    for (int k = 0;; ++k) {
        const double t = tr.a + k * tr.dt;
        if (t > tr.b + 1e-12) break;
        ts.push_back(std::min(t, tr.b));
    }
    struct Point {
        double t, R;
        json row;
        std::string csv;
        bool ok = false;
    };
    std::vector<Point> pts;
    for (double R : radii)
        for (double t : ts) pts.push_back({t, R, {}, {}, false});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < pts.size(); k = next++) {
            Point& pt = pts[k];
            const auto N = static_cast<std::size_t>(std::llround(pt.R * o.nodes_per_unit));
            pt.row = {{"t", pt.t}, {"R", pt.R}, {"N", N}};
            try {
                const RadialGrid g(pt.R, N);
                json scratch;
                const SolutionFamily fam = family_to(g, o, pt.t, scratch);
                const FamilyMember& m = fam.members.back();
                bool ok = true;
                pt.row["checks"] = member_checks(m.profile, ok);
                pt.row["report"] = to_json(m.report);
                pt.csv = profile_csv(m.profile);
                pt.ok = ok;
            } catch (const PipelineFailure& e) {
                pt.row["error"] = e.message;
            } catch (const std::exception& e) {
                pt.row["error"] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int width = std::max(1, std::min<int>(o.jobs, static_cast<int>(pts.size())));
    for (int k = 0; k < width; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    json rows = json::array();
    for (auto& pt : pts) {
        if (!pt.csv.empty()) {
            char name[96];
            std::snprintf(name, sizeof name, "sweep/t_%.6f_R_%.3f.csv", pt.t, pt.R);
            pt.row["csv"] = name;
            ctx.emit(r, name, pt.csv);
        }
        r.invariants_ok = r.invariants_ok && pt.ok;
        rows.push_back(pt.row);
    }
    r.report["points"] = std::move(rows);
    return r;
}

// Inserts the config file's flat keys as `--key value` right after the verb,
// so flags given on the command line (parsed later, last wins) override them.
std::vector<std::string> merge_config(const std::vector<std::string>& argv) {
    std::string path;
    for (std::size_t k = 1; k < argv.size(); ++k) {
        if (argv[k] == "--config" && k + 1 < argv.size()) path = argv[k + 1];
        if (argv[k].rfind("--config=", 0) == 0) path = argv[k].substr(9);
    }
    if (path.empty()) return argv;
    std::ifstream is(path);
    if (!is) invalid("config", "cannot read '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const json::exception& e) {
        invalid("config", std::string("not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) invalid("config", "top level must be an object");

    std::vector<std::string> tokens;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const json& v = it.value();
        const std::string flag = "--" + it.key();
        if (v.is_boolean()) {
            if (v.get<bool>()) tokens.push_back(flag);
        } else if (v.is_string()) {
            tokens.push_back(flag);
            tokens.push_back(v.get<std::string>());
        } else if (v.is_number()) {
            tokens.push_back(flag);
            tokens.push_back(v.dump());
        } else {
            invalid(it.key(), "config values must be scalars");
        }
    }
    std::vector<std::string> out = argv;
    auto verb = std::find_if(out.begin() + 1, out.end(),
                             [](const std::string& s) { return std::find(kVerbs.begin(), kVerbs.end(), s) != kVerbs.end(); });
    if (verb == out.end()) return out;
    out.insert(verb + 1, tokens.begin(), tokens.end());
    return out;
}

json effective_config(const CLI::App& app, const CLI::App& sub) {
    json j = json::object();
    j["verb"] = sub.get_name();
    for (const CLI::App* a : {&app, &sub})
        for (const CLI::Option* opt : a->get_options()) {
            const std::string name = opt->get_single_name();
            if (name.empty() || name == "help" || name == "config" || name == "out" || name == "jobs") continue;
            if (opt->get_expected_min() == 0)
                j[name] = opt->count() > 0;
            else
                j[name] = opt->count() > 0 ? opt->results().back() : opt->get_default_str();
        }
    return j;
}

void add_grid(CLI::App* s, Options& o, double R, long N) {
    o.R = R;
    o.N = N;
    s->add_option("--R", o.R, "outer radius")->capture_default_str();
    s->add_option("--N", o.N, "number of grid intervals")->capture_default_str();
}

void add_solver(CLI::App* s, Options& o) {
    s->add_option("--tol", o.tol, "Newton residual tolerance (sup-norm)")->capture_default_str();
    s->add_option("--dt", o.dt, "initial continuation step")->capture_default_str();
    s->add_option("--dt-min", o.dt_min, "smallest continuation step")->capture_default_str();
    s->add_option("--max-iters", o.max_iters, "Newton iterations per step")->capture_default_str();
    s->add_option("--bc", o.bc, "outer boundary data: asymptotic | sharp")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> args(argv, argv + argc);
    try {
        args = merge_config(args);
    } catch (const ValidationError& e) {
        std::cerr << "invalid " << e.field << ": " << e.message << "\n";
        return 2;
    }

    // Defaults differ per verb, so each verb owns a copy of the options.
    CLI::App app{"Equivariant p-wave Ginzburg-Landau vortex solver"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.fallthrough();
    app.require_subcommand(1);

    Options global;
    app.add_option("--config", global.config, "JSON file of flat flag=value pairs");
    app.add_option("--out", global.out, "output directory")->capture_default_str();
    app.add_option("--jobs", global.jobs, "parallel sweep points")->capture_default_str();
    app.add_option("--seed", global.seed, "seed for randomized checks")->capture_default_str();

    std::map<std::string, Options> per_verb;
    for (const auto& v : kVerbs) per_verb[v] = global;

    auto* classical = app.add_subcommand("classical", "degree-one Ginzburg-Landau profile");
    add_grid(classical, per_verb["classical"], 60.0, 6000);
    classical->add_option("--tol", per_verb["classical"].tol, "Newton tolerance")->capture_default_str();

    auto* solve = app.add_subcommand("solve", "coupled system at one t (reached by continuation)");
    add_grid(solve, per_verb["solve"], 100.0, 10000);
    add_solver(solve, per_verb["solve"]);
    solve->add_option("--t", per_verb["solve"].t, "coupling")->capture_default_str();

    auto* cont = app.add_subcommand("continue", "solution family over a t-range");
    add_grid(cont, per_verb["continue"], 100.0, 10000);
    add_solver(cont, per_verb["continue"]);
    cont->add_option("--t-range", per_verb["continue"].t_range, "a:b:dt")->capture_default_str();

    auto* extend = app.add_subcommand("extend", "solve on R, then re-solve on R-new");
    add_grid(extend, per_verb["extend"], 50.0, 5000);
    add_solver(extend, per_verb["extend"]);
    extend->add_option("--t", per_verb["extend"].t, "coupling")->capture_default_str();
    per_verb["extend"].R_new = 100.0;
    per_verb["extend"].N_new = 10000;
    extend->add_option("--R-new", per_verb["extend"].R_new, "new outer radius")->capture_default_str();
    extend->add_option("--N-new", per_verb["extend"].N_new, "new interval count")->capture_default_str();

    auto* asym = app.add_subcommand("asym", "tail coefficients, barrier radii and fitted tails");
    add_grid(asym, per_verb["asym"], 100.0, 10000);
    add_solver(asym, per_verb["asym"]);
    asym->add_option("--t", per_verb["asym"].t, "coupling")->capture_default_str();
    asym->add_flag("--no-fit", per_verb["asym"].no_fit, "skip the solve and tail fit");
    asym->add_option("--delta", per_verb["asym"].delta, "barrier offset in (0, 1/32)")->capture_default_str();

    auto* poho = app.add_subcommand("pohozaev", "Pohozaev identity check at t = 1");
    add_grid(poho, per_verb["pohozaev"], 100.0, 10000);
    add_solver(poho, per_verb["pohozaev"]);
    poho->add_option("--t", per_verb["pohozaev"].t, "coupling (must be 1)")->capture_default_str();

    auto* stab = app.add_subcommand("stability", "L_-/L_+ spectra and the first variation h");
    add_grid(stab, per_verb["stability"], 60.0, 6000);
    stab->add_option("--tol", per_verb["stability"].tol, "classical Newton tolerance")->capture_default_str();

    auto* planar = app.add_subcommand("planar", "Dirichlet minimization on a disk");
    {
        Options& o = per_verb["planar"];
        o.R = 20.0;
        planar->add_option("--R", o.R, "disk radius")->capture_default_str();
        planar->add_option("--Nr", o.n_r, "radial intervals")->capture_default_str();
        planar->add_option("--Ntheta", o.n_theta, "angular nodes")->capture_default_str();
        planar->add_option("--nu", o.nu, "anisotropy in (-1, 1)")->capture_default_str();
        planar->add_option("--kappa", o.kappa, "Ginzburg-Landau parameter")->capture_default_str();
        planar->add_option("--data", o.data, "rim data: vortex | constant | affine")->capture_default_str();
        planar->add_option("--c-minus", o.c_minus, "constant part of g_-")->capture_default_str();
        planar->add_option("--c-plus", o.c_plus, "constant part of g_+")->capture_default_str();
        planar->add_option("--alpha", o.alpha, "slope of affine data")->capture_default_str();
        planar->add_option("--perturb", o.perturb, "amplitude of a non-equivariant start perturbation")
            ->capture_default_str();
        planar->add_option("--planar-tol", o.planar_tol, "gradient tolerance")->capture_default_str();
        planar->add_option("--planar-iters", o.planar_iters, "iteration cap")->capture_default_str();
        planar->add_flag("--coercivity", o.coercivity, "also estimate the coercivity constant");
    }

    auto* sweep = app.add_subcommand("sweep", "independent (t, R) points, solved in parallel");
    add_solver(sweep, per_verb["sweep"]);
    sweep->add_option("--t-range", per_verb["sweep"].t_range, "a:b:dt")->capture_default_str();
    sweep->add_option("--R-values", per_verb["sweep"].R_values, "comma-separated radii")->capture_default_str();
    sweep->add_option("--nodes-per-unit", per_verb["sweep"].nodes_per_unit, "grid intervals per unit radius")
        ->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string verb = sub->get_name();
    Options opt = per_verb[verb];
    opt.out = global.out;
    opt.jobs = global.jobs;
    opt.seed = global.seed;
    try {
        validate(verb, opt);
    } catch (const ValidationError& e) {
        std::cerr << "invalid " << e.field << ": " << e.message << "\n";
        return 2;
    }

    const json cfg = effective_config(app, *sub);
    Context ctx{opt, fs::path(opt.out), git_blob_sha1(cfg.dump())};

    RunResult result;
    int status = 0;
    std::string failure;
    try {
        if (verb == "classical") result = run_classical(ctx);
        else if (verb == "solve") result = run_solve(ctx);
        else if (verb == "continue") result = run_continue(ctx);
        else if (verb == "extend") result = run_extend(ctx);
        else if (verb == "asym") result = run_asym(ctx);
        else if (verb == "pohozaev") result = run_pohozaev(ctx);
        else if (verb == "stability") result = run_stability(ctx);
        else if (verb == "planar") result = run_planar(ctx);
        else result = run_sweep(ctx);
        if (!result.invariants_ok) {
            status = 1;
            failure = "asserted invariants failed";
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid " << e.field << ": " << e.message << "\n";
        return 2;
    } catch (const PipelineFailure& e) {
        result.report = e.report;
        failure = e.message;
        status = 1;
    } catch (const SolverFailure& e) {
        result.report["report"] = to_json(e.report());
        failure = e.what();
        status = 1;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_argument || e.kind() == ErrorKind::ill_posed_boundary_data) {
            std::cerr << "invalid input (" << to_string(e.kind()) << "): " << e.what() << "\n";
            return 2;
        }
        result.report["error_kind"] = to_string(e.kind());
        failure = e.what();
        status = 1;
    }

    result.report["config_hash"] = ctx.hash;
    result.report["verb"] = verb;
    result.report["status"] = status == 0 ? "ok" : "failed";
    if (!failure.empty()) result.report["failure"] = failure;
    const std::string report_name = verb + ".json";
    write_json(ctx.out / report_name, result.report);
    result.outputs.push_back(report_name);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(ctx.out / "manifest.json", {{"verb", verb},
                                           {"inputs", cfg},
                                           {"config_hash", ctx.hash},
                                           {"wall_time_s", wall},
                                           {"exit_status", status},
                                           {"outputs", result.outputs}});
    if (status != 0) std::cerr << verb << ": " << failure << "\n";
    return status;
}
