#include "pwave/newton.hpp"

#include "pwave/errors.hpp"

#include <cmath>

namespace pwave {

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

SolveReport damped_newton(std::vector<double>& x, const ResidualFn& residual, const StepFn& step,
                          const NewtonOptions& opt) {
    SolveReport rep;
    std::vector<double> F = residual(x);
    if (!all_finite(F)) fail(ErrorKind::numerical_breakdown, "non-finite residual at Newton start");
    double sup = sup_norm(F);
    double nrm = norm2(F);
    rep.history.push_back(sup);

    while (sup > opt.tol && rep.iterations < opt.max_iters) {
        const std::vector<double> dx = step(x, F);
        if (!all_finite(dx)) fail(ErrorKind::numerical_breakdown, "non-finite Newton correction");

        double lambda = 1.0;
        std::vector<double> trial(x.size());
        std::vector<double> Ft;
        double nrm_t = 0.0;
        int backtracks = 0;
        for (;;) {
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + lambda * dx[k];
            Ft = residual(trial);
            nrm_t = all_finite(Ft) ? norm2(Ft) : INFINITY;
            if (nrm_t <= (1.0 - opt.armijo * lambda) * nrm) break;
            // once at roundoff level the merit can stall; accept a full step that does not blow up
            if (backtracks == 0 && nrm_t <= 10.0 * nrm && sup < 1e3 * opt.tol && std::isfinite(nrm_t)) break;
            if (backtracks == opt.max_backtracks) break;
            lambda *= opt.shrink;
            ++backtracks;
        }
        if (backtracks > 0) ++rep.damping_events;
        if (!std::isfinite(nrm_t)) fail(ErrorKind::numerical_breakdown, "non-finite Newton iterate");
        const bool stalled = nrm_t > (1.0 - opt.armijo * lambda) * nrm && backtracks == opt.max_backtracks;

        x = trial;
        F = std::move(Ft);
        nrm = nrm_t;
        sup = sup_norm(F);
        ++rep.iterations;
        rep.history.push_back(sup);
        if (stalled) break;
    }
    rep.final_residual = sup;
    rep.converged = sup <= opt.tol;
    return rep;
}

std::vector<double> solve_tridiagonal(std::span<const double> lo, std::span<const double> mid,
                                      std::span<const double> hi, std::span<const double> rhs) {
    const std::size_t n = mid.size();
    require(lo.size() == n && hi.size() == n && rhs.size() == n, "tridiagonal size mismatch");
    std::vector<double> c(n), d(n), x(n);
    double piv = mid[0];
    if (piv == 0.0) fail(ErrorKind::numerical_breakdown, "zero pivot in tridiagonal solve");
    c[0] = n > 1 ? hi[0] / piv : 0.0;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = mid[i] - lo[i] * c[i - 1];
        if (piv == 0.0 || !std::isfinite(piv)) fail(ErrorKind::numerical_breakdown, "zero pivot in tridiagonal solve");
        c[i] = i + 1 < n ? hi[i] / piv : 0.0;
        d[i] = (rhs[i] - lo[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

} // namespace pwave
