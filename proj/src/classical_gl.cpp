#include "pwave/classical_gl.hpp"

#include "pwave/newton.hpp"
#include "pwave/solver_errors.hpp"

#include <cmath>

namespace pwave {

double classical_outer_value(double R) {
    const double R2 = R * R;
    return 1.0 - 0.5 / R2 - 9.0 / (8.0 * R2 * R2);
}

std::vector<double> classical_residual(const RadialGrid& grid, std::span<const double> f) {
    const double h = grid.h();
    std::vector<double> res(grid.N() - 1);
    for (std::size_t i = 1; i < grid.N(); ++i) {
        const double r = grid.r(i);
        const double a = 1.0 / (2.0 * r * h);
        const double lap = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h) + a * (f[i + 1] - f[i - 1]);
        res[i - 1] = -(lap - f[i] / (r * r)) + f[i] * (f[i] * f[i] - 1.0);
    }
    return res;
}

ClassicalProfile solve_classical(const RadialGrid& grid, double tol, int max_iters) {
    require(tol > 0.0, "tolerance must be positive");
    const std::size_t N = grid.N();
    const double h = grid.h();

    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i <= N; ++i) {
        const double r = grid.r(i);
        f[i] = r / std::sqrt(r * r + 2.0);
    }
    f[0] = 0.0;
    f[N] = classical_outer_value(grid.R());

    std::vector<double> x(f.begin() + 1, f.end() - 1);
    auto full = [&](std::span<const double> inner) {
        std::vector<double> g(f);
        std::copy(inner.begin(), inner.end(), g.begin() + 1);
        return g;
    };
    auto res = [&](std::span<const double> inner) { return classical_residual(grid, full(inner)); };
    auto step = [&](std::span<const double> inner, std::span<const double> F) {
        const std::size_t m = inner.size();
        std::vector<double> lo(m), mid(m), hi(m), rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double r = grid.r(k + 1);
            const double a = 1.0 / (2.0 * r * h);
            lo[k] = -(1.0 / (h * h) - a);
            hi[k] = -(1.0 / (h * h) + a);
            mid[k] = 2.0 / (h * h) + 1.0 / (r * r) + 3.0 * inner[k] * inner[k] - 1.0;
            rhs[k] = -F[k];
        }
        return solve_tridiagonal(lo, mid, hi, rhs);
    };

    NewtonOptions opt;
    opt.tol = tol;
    opt.max_iters = max_iters;
    SolveReport rep = damped_newton(x, res, step, opt);
    std::copy(x.begin(), x.end(), f.begin() + 1);
    if (!rep.converged) throw SolverFailure("classical profile Newton did not converge", rep);
    return ClassicalProfile{grid, std::move(f), std::move(rep)};
}

ProfilePair embed_classical(const ClassicalProfile& c, double t) {
    return ProfilePair(c.grid, c.f, std::vector<double>(c.f.size(), 0.0), t, -1);
}

} // namespace pwave
