#include "pwave/pwave_solver.hpp"

#include "pwave/asymptotics.hpp"
#include "pwave/newton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pwave {

namespace {

NewtonOptions newton_options(const ContinuationConfig& cfg) {
    NewtonOptions opt;
    opt.tol = cfg.newton_tol;
    opt.max_iters = cfg.max_newton_iters;
    opt.shrink = cfg.armijo_shrink;
    opt.max_backtracks = cfg.armijo_max_backtracks;
    return opt;
}

std::vector<double> interior(const ProfilePair& p) {
    const std::size_t N = p.grid.N();
    std::vector<double> x(2 * (N - 1));
    for (std::size_t i = 1; i < N; ++i) {
        x[2 * (i - 1)] = p.fm[i];
        x[2 * (i - 1) + 1] = p.fp[i];
    }
    return x;
}

void scatter(ProfilePair& p, std::span<const double> x) {
    const std::size_t N = p.grid.N();
    for (std::size_t i = 1; i < N; ++i) {
        p.fm[i] = x[2 * (i - 1)];
        p.fp[i] = x[2 * (i - 1) + 1];
    }
}

// Newton on the (diagonalized) residual with the boundary values already in `p`.
SolveReport newton_in_place(ProfilePair& p, const NewtonOptions& opt) {
    std::vector<double> x = interior(p);
    ProfilePair work = p;
    auto res = [&](std::span<const double> y) {
        scatter(work, y);
        return residual(work);
    };
    auto step = [&](std::span<const double> y, std::span<const double> F) {
        scatter(work, y);
        std::vector<double> rhs(F.size());
        for (std::size_t k = 0; k < F.size(); ++k) rhs[k] = -F[k];
        return jacobian(work, SystemForm::diagonalized).solve(rhs);
    };
    SolveReport rep = damped_newton(x, res, step, opt);
    scatter(p, x);
    return rep;
}

double linear_interpolate(const RadialGrid& g, const std::vector<double>& f, double r) {
    const std::size_t i = g.index_below(r);
    if (i >= g.N()) return f[g.N()];
    const double s = (r - g.r(i)) / g.h();
    return (1.0 - s) * f[i] + s * f[i + 1];
}

} // namespace

void ContinuationConfig::validate() const {
    require(t_start >= 0.0 && t_start <= t_end && t_end <= 1.0, "continuation range must satisfy 0 <= t_start <= t_end <= 1");
    require(dt_min > 0.0 && dt_min <= dt_init, "continuation steps must satisfy 0 < dt_min <= dt_init");
    require(newton_tol > 0.0, "Newton tolerance must be positive");
    require(max_newton_iters > 0, "max_newton_iters must be positive");
    require(armijo_shrink > 0.0 && armijo_shrink < 1.0, "Armijo shrink factor must lie in (0,1)");
    require(armijo_max_backtracks >= 0, "Armijo backtrack limit must be non-negative");
}

std::pair<double, double> outer_values(double R, double t, OuterBC bc) {
    if (bc == OuterBC::sharp) return {1.0, 0.0};
    const TailModel m = expansion_coefficients(t);
    return {m.w_minus(R), m.w_plus(R)};
}

std::pair<ProfilePair, SolveReport> solve_pwave(const RadialGrid& grid, double t, const ProfilePair& init,
                                                const ContinuationConfig& cfg) {
    cfg.validate();
    require(t >= 0.0 && t <= 1.0, "coupling t must lie in [0,1]");
    require(init.grid == grid, "initial profile lives on a different grid");
    ProfilePair p = init;
    p.t = t;
    p.degree = -1;
    p.validate();
    const auto [bm, bp] = outer_values(grid.R(), t, cfg.bc);
    p.fm[grid.N()] = bm;
    p.fp[grid.N()] = bp;

    SolveReport rep = newton_in_place(p, newton_options(cfg));
    if (!rep.converged)
        throw SolverFailure("p-wave Newton did not converge at t = " + std::to_string(t), rep);
    return {std::move(p), std::move(rep)};
}

SolutionFamily continue_in_t(const RadialGrid& grid, const ContinuationConfig& cfg, const ClassicalProfile& base) {
    cfg.validate();
    require(base.report.converged, "continuation needs a converged classical base profile");
    require(base.grid == grid, "base profile lives on a different grid");

    SolutionFamily fam;
    {
        auto [p, rep] = solve_pwave(grid, cfg.t_start, embed_classical(base, cfg.t_start), cfg);
        fam.members.push_back({cfg.t_start, std::move(p), std::move(rep)});
    }

    const double eps = 1e-12;
    double dt = cfg.dt_init;
    while (fam.members.back().t < cfg.t_end - eps) {
        const FamilyMember& last = fam.members.back();
        const double t_next = std::min(last.t + dt, cfg.t_end);

        ProfilePair guess = last.profile;
        if (fam.members.size() >= 2) {
            const FamilyMember& prev = fam.members[fam.members.size() - 2];
            const double s = (t_next - last.t) / (last.t - prev.t);
            for (std::size_t i = 0; i < guess.fm.size(); ++i) {
                guess.fm[i] += s * (last.profile.fm[i] - prev.profile.fm[i]);
                guess.fp[i] += s * (last.profile.fp[i] - prev.profile.fp[i]);
            }
        }

        try {
            auto [p, rep] = solve_pwave(grid, t_next, guess, cfg);
            fam.members.push_back({t_next, std::move(p), std::move(rep)});
            dt = std::min(2.0 * dt, cfg.dt_init);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::solver_failure && e.kind() != ErrorKind::numerical_breakdown) throw;
            dt *= 0.5;
            if (dt < cfg.dt_min)
                throw ContinuationStalled("continuation step fell below dt_min at t = " + std::to_string(last.t),
                                          std::move(fam));
        }
    }
    return fam;
}

std::pair<ProfilePair, SolveReport> extend_domain(const ProfilePair& sol, double R_new, std::size_t N_new,
                                                  const ContinuationConfig& cfg) {
    const RadialGrid& old_grid = sol.grid;
    require(R_new > old_grid.R(), "extend_domain needs R_new > R_old");
    const RadialGrid grid(R_new, N_new);
    const TailModel tail = expansion_coefficients(sol.t);

    ProfilePair init = ProfilePair::zeros(grid, sol.t, -1);
    for (std::size_t i = 1; i <= grid.N(); ++i) {
        const double r = grid.r(i);
        if (r <= old_grid.R()) {
            init.fm[i] = linear_interpolate(old_grid, sol.fm, r);
            init.fp[i] = linear_interpolate(old_grid, sol.fp, r);
        } else {
            init.fm[i] = tail.w_minus(r);
            init.fp[i] = tail.w_plus(r);
        }
    }

    auto [p, rep] = solve_pwave(grid, sol.t, init, cfg);

    double change_all = 0.0, change_inner = 0.0, change_minus_inner = 0.0;
    for (std::size_t i = 0; i <= grid.N(); ++i) {
        const double r = grid.r(i);
        if (r > old_grid.R() * (1.0 + 1e-12)) break;
        const double dm = std::abs(p.fm[i] - linear_interpolate(old_grid, sol.fm, r));
        const double dp = std::abs(p.fp[i] - linear_interpolate(old_grid, sol.fp, r));
        change_all = std::max({change_all, dm, dp});
        if (r <= 0.5 * old_grid.R()) {
            change_inner = std::max({change_inner, dm, dp});
            change_minus_inner = std::max(change_minus_inner, dm);
        }
    }
    rep.diagnostics["R_old"] = old_grid.R();
    rep.diagnostics["R_new"] = R_new;
    rep.diagnostics["sup_change_old_domain"] = change_all;
    rep.diagnostics["sup_change_inner_half"] = change_inner;
    rep.diagnostics["sup_change_minus_inner_half"] = change_minus_inner;
    return {std::move(p), std::move(rep)};
}

GradientFlowResult gradient_flow(const ProfilePair& init, const GradientFlowConfig& cfg) {
    require(cfg.steps >= 0, "flow step count must be non-negative");
    require(cfg.dt > 0.0, "flow step must be positive");
    require(cfg.dt_min >= 0.0 && cfg.dt_min <= cfg.dt, "flow dt_min must lie in [0, dt]");
    init.validate();
    const auto& g = init.grid;
    const std::size_t N = g.N();

    GradientFlowResult out{init, {}, 0.0, 0.0, cfg.dt};
    ProfilePair& p = out.profile;
    double E = energy_radial(p).total;
    out.energy.push_back(E);
    out.initial_residual = sup_norm(residual(p));

    ProfilePair trial = p;
    double dt = cfg.dt;
    for (int step = 0; step < cfg.steps; ++step) {
        const std::vector<double> grad = energy_gradient(p);
        for (;;) {
            for (std::size_t i = 1; i < N; ++i) {
                const double mass = 2.0 * g.r(i) * g.h();
                trial.fm[i] = p.fm[i] - dt * grad[2 * i] / mass;
                trial.fp[i] = p.fp[i] - dt * grad[2 * i + 1] / mass;
            }
            const double Et = energy_radial(trial).total;
            if (std::isfinite(Et) && Et <= E + 1e-13 * std::max(1.0, std::abs(E))) {
                std::swap(p.fm, trial.fm);
                std::swap(p.fp, trial.fp);
                E = Et;
                break;
            }
            if (cfg.dt_min > 0.0 && 0.5 * dt >= cfg.dt_min) {
                dt *= 0.5;
                continue;
            }
            fail(ErrorKind::step_size_failure,
                 "gradient flow energy increased at step " + std::to_string(step) + " with dt = " + std::to_string(dt));
        }
        out.energy.push_back(E);
    }
    out.final_residual = sup_norm(residual(p));
    out.final_dt = dt;
    return out;
}

std::pair<ProfilePair, SolveReport> solve_general_degree(const RadialGrid& grid, int n, const ContinuationConfig& cfg) {
    cfg.validate();
    const std::size_t N = grid.N();
    ProfilePair p = ProfilePair::zeros(grid, 0.0, n);
    const double scale = std::sqrt(grid.R() * grid.R() + 2.0) / grid.R();
    for (std::size_t i = 1; i <= N; ++i) {
        const double r = grid.r(i);
        p.fm[i] = scale * r / std::sqrt(r * r + 2.0);
    }
    p.fm[N] = 1.0;
    p.fp[N] = 0.0;

    const NewtonOptions opt = newton_options(cfg);
    SolveReport total;
    total.exploratory = true;
    auto absorb = [&](const SolveReport& r) {
        total.iterations += r.iterations;
        total.damping_events += r.damping_events;
        total.history.insert(total.history.end(), r.history.begin(), r.history.end());
        total.final_residual = r.final_residual;
        total.converged = r.converged;
    };

    auto attempt = [&](ProfilePair& q) {
        try {
            const SolveReport r = newton_in_place(q, opt);
            absorb(r);
            return r.converged;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical_breakdown) throw;
            total.converged = false;
            return false;
        }
    };

    if (!attempt(p)) {
        total.diagnostics["t_reached"] = 0.0;
        throw SolverFailure("degree " + std::to_string(n) + " solve failed at t = 0", total);
    }
    double dt = cfg.dt_init;
    while (p.t < 1.0 - 1e-12) {
        ProfilePair q = p;
        q.t = std::min(p.t + dt, 1.0);
        if (attempt(q)) {
            p = std::move(q);
            dt = std::min(2.0 * dt, cfg.dt_init);
        } else {
            dt *= 0.5;
            if (dt < cfg.dt_min) {
                total.converged = false;
                total.diagnostics["t_reached"] = p.t;
                throw SolverFailure("degree " + std::to_string(n) + " continuation stalled at t = " + std::to_string(p.t),
                                    total);
            }
        }
    }
    total.diagnostics["t_reached"] = 1.0;
    total.diagnostics["degree"] = n;
    return {std::move(p), std::move(total)};
}

} // namespace pwave
