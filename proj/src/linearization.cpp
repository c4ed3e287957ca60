#include "pwave/linearization.hpp"

#include "pwave/errors.hpp"
#include "pwave/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwave {

namespace {

std::vector<double> potential_from(const ClassicalProfile& f, double a) {
    std::vector<double> V(f.f.size());
    for (std::size_t i = 0; i < V.size(); ++i) V[i] = a * f.f[i] * f.f[i] - 1.0;
    return V;
}

// Number of eigenvalues of K - x M below zero (Sturm count on the LDL^T pivots).
std::size_t sturm_count(const WeightedOperator& op, double x) {
    const std::size_t n = op.diag.size();
    const double h = op.grid.h();
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double m = op.mass[k] / h;
        double pivot = op.diag[k] - x * m;
        if (k > 0) pivot -= op.off[k - 1] * op.off[k - 1] / d;
        if (pivot == 0.0) pivot = -std::numeric_limits<double>::min();
        if (pivot < 0.0) ++count;
        d = pivot;
    }
    return count;
}

double rayleigh(const WeightedOperator& op, const std::vector<double>& x) {
    const std::size_t n = op.diag.size();
    const double h = op.grid.h();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        num += op.diag[k] * x[k] * x[k];
        if (k + 1 < n) num += 2.0 * op.off[k] * x[k] * x[k + 1];
        den += op.mass[k] / h * x[k] * x[k];
    }
    return num / den;
}

} // namespace

WeightedOperator assemble_operator(const RadialGrid& grid, std::vector<double> V) {
    require(V.size() == grid.size(), "potential length must equal N+1");
    const std::size_t N = grid.N();
    const double h = grid.h();
    WeightedOperator op{grid, std::move(V), {}, {}, {}};
    op.diag.resize(N - 1);
    op.off.resize(N - 2);
    op.mass.resize(N - 1);
    for (std::size_t i = 1; i < N; ++i) {
        const double r = grid.r(i);
        op.diag[i - 1] = 2.0 * r / (h * h) + 1.0 / r + r * op.V[i];
        op.mass[i - 1] = r * h;
        if (i + 1 < N) op.off[i - 1] = -(r + 0.5 * h) / (h * h);
    }
    return op;
}

WeightedOperator l_minus(const ClassicalProfile& f) { return assemble_operator(f.grid, potential_from(f, 3.0)); }

WeightedOperator l_plus(const ClassicalProfile& f) { return assemble_operator(f.grid, potential_from(f, 2.0)); }

std::vector<double> WeightedOperator::apply(std::span<const double> phi) const {
    require(phi.size() == grid.size(), "function length must equal N+1");
    const double h = grid.h();
    std::vector<double> out(grid.N() - 1);
    for (std::size_t i = 1; i < grid.N(); ++i) {
        const double r = grid.r(i);
        const double lap = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h) + (phi[i + 1] - phi[i - 1]) / (2.0 * r * h);
        out[i - 1] = -lap + phi[i] / (r * r) + V[i] * phi[i];
    }
    return out;
}

double WeightedOperator::inner(std::span<const double> u, std::span<const double> v) const {
    require(u.size() == mass.size() && v.size() == mass.size(), "inner product expects interior vectors");
    double s = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) s += mass[k] * u[k] * v[k];
    return s;
}

double q0_value(const ClassicalProfile& f, std::span<const double> phi_minus, std::span<const double> phi_plus) {
    const auto& g = f.grid;
    const std::size_t N = g.N();
    require(phi_minus.size() == g.size() && phi_plus.size() == g.size(), "test functions must have N+1 entries");
    require(phi_minus[0] == 0.0 && phi_minus[N] == 0.0 && phi_plus[0] == 0.0 && phi_plus[N] == 0.0,
            "test functions must vanish at r = 0 and r = R");
    const double h = g.h();
    double q = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double rm = g.r(i) + 0.5 * h;
        const double dm = phi_minus[i + 1] - phi_minus[i];
        const double dp = phi_plus[i + 1] - phi_plus[i];
        q += rm * (dm * dm + dp * dp) / h;
    }
    for (std::size_t i = 1; i < N; ++i) {
        const double r = g.r(i);
        const double f2 = f.f[i] * f.f[i];
        q += h * r * ((1.0 / (r * r) + 3.0 * f2 - 1.0) * phi_minus[i] * phi_minus[i] +
                      (1.0 / (r * r) + 2.0 * f2 - 1.0) * phi_plus[i] * phi_plus[i]);
    }
    return q;
}

EigenResult smallest_eigenpair(const WeightedOperator& op, double tol, int max_iters) {
    require(tol > 0.0, "eigenvalue tolerance must be positive");
    const std::size_t n = op.diag.size();
    const double h = op.grid.h();

    // Gershgorin bracket for the scaled problem M^{-1/2} K M^{-1/2}.
    double lo = std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double m = op.mass[k] / h;
        double radius = 0.0;
        if (k > 0) radius += std::abs(op.off[k - 1]) / std::sqrt(m * op.mass[k - 1] / h);
        if (k + 1 < n) radius += std::abs(op.off[k]) / std::sqrt(m * op.mass[k + 1] / h);
        lo = std::min(lo, op.diag[k] / m - radius);
        hi = std::min(hi, op.diag[k] / m);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-6 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (sturm_count(op, mid) >= 1 ? hi : lo) = mid;
    }
    const double shift = lo - 1e-6 * std::max(1.0, std::abs(lo));

    std::vector<double> lower(n), mid(n), upper(n);
    for (std::size_t k = 0; k < n; ++k) {
        mid[k] = op.diag[k] - shift * op.mass[k] / h;
        if (k > 0) lower[k] = op.off[k - 1];
        if (k + 1 < n) upper[k] = op.off[k];
    }

    std::vector<double> x(n, 1.0), rhs(n);
    double lambda = rayleigh(op, x);
    EigenResult out;
    for (int it = 1; it <= max_iters; ++it) {
        for (std::size_t k = 0; k < n; ++k) rhs[k] = op.mass[k] / h * x[k];
        x = solve_tridiagonal(lower, mid, upper, rhs);
        double norm = 0.0;
        for (std::size_t k = 0; k < n; ++k) norm += op.mass[k] * x[k] * x[k];
        norm = std::sqrt(norm);
        if (!std::isfinite(norm) || norm == 0.0) fail(ErrorKind::numerical_breakdown, "inverse iteration lost its iterate");
        for (double& v : x) v /= norm;
        const double next = rayleigh(op, x);
        const bool done = std::abs(next - lambda) <= tol * std::max(std::abs(next), 1e-300);
        lambda = next;
        if (done && it > 1) {
            out.lambda = lambda;
            out.iterations = it;
            out.vector.assign(op.grid.size(), 0.0);
            std::copy(x.begin(), x.end(), out.vector.begin() + 1);
            return out;
        }
    }
    fail(ErrorKind::numerical_breakdown, "inverse iteration did not converge");
}

double smallest_eigenvalue(const WeightedOperator& op, double tol, int max_iters) {
    return smallest_eigenpair(op, tol, max_iters).lambda;
}

double h_outer_value(double R) {
    const double R2 = R * R;
    return -0.5 / R2 - 13.0 / (4.0 * R2 * R2);
}

HSolution solve_h(const ClassicalProfile& f) {
    require(f.report.converged, "solve_h needs a converged classical profile");
    const auto& g = f.grid;
    const std::size_t N = g.N();
    const double dr = g.h();
    const WeightedOperator op = l_plus(f);

    const std::size_t m = N - 1;
    std::vector<double> lo(m), mid(m), hi(m), rhs(m);
    const double hR = h_outer_value(g.R());
    for (std::size_t i = 1; i < N; ++i) {
        const double r = g.r(i);
        const double a = 1.0 / (2.0 * r * dr);
        lo[i - 1] = -(1.0 / (dr * dr) - a);
        hi[i - 1] = -(1.0 / (dr * dr) + a);
        mid[i - 1] = 2.0 / (dr * dr) + 1.0 / (r * r) + op.V[i];
        rhs[i - 1] = -0.5 * f.f[i] * (1.0 - f.f[i] * f.f[i]);
    }
    rhs[m - 1] -= hi[m - 1] * hR;
    const std::vector<double> inner = solve_tridiagonal(lo, mid, hi, rhs);

    HSolution out{g, std::vector<double>(g.size(), 0.0), {}, 0.0, 0.0, false, 0.0};
    std::copy(inner.begin(), inner.end(), out.h.begin() + 1);
    out.h[N] = hR;

    const std::vector<double> Lh = op.apply(out.h);
    double res = 0.0;
    for (std::size_t i = 1; i < N; ++i) res = std::max(res, std::abs(Lh[i - 1] + 0.5 * f.f[i] * (1.0 - f.f[i] * f.f[i])));
    out.report.converged = std::isfinite(res);
    out.report.iterations = 1;
    out.report.final_residual = res;
    out.report.history = {res};

    out.h_min = *std::min_element(out.h.begin() + 1, out.h.end() - 1);
    out.negative_interior = std::all_of(out.h.begin() + 1, out.h.end() - 1, [](double v) { return v < 0.0; });
    out.h_prime_0 = (-3.0 * out.h[0] + 4.0 * out.h[1] - out.h[2]) / (2.0 * dr);

    // least squares of g = h/f on {1, r^2} over 0 < r <= 0.2
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 1; i <= N && g.r(i) <= 0.2 + 1e-12; ++i) {
        const double x = g.r(i) * g.r(i);
        const double y = out.h[i] / f.f[i];
        s1 += 1;
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    const double det = s1 * sxx - sx * sx;
    if (s1 >= 3 && det > 0.0) out.g2_estimate = (s1 * sxy - sx * sy) / det;
    out.report.diagnostics["g2_fit_nodes"] = s1;
    out.report.diagnostics["g0_estimate"] = s1 >= 3 && det > 0.0 ? (sxx * sy - sx * sxy) / det : 0.0;
    return out;
}

double embedding_check(const RadialGrid& grid, std::span<const double> phi) {
    require(phi.size() == grid.size(), "function length must equal N+1");
    require(phi[0] == 0.0, "embedding check needs phi(0) = 0");
    const double h = grid.h();
    double sup = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < grid.N(); ++i) {
        const double d = (phi[i + 1] - phi[i]) / h;
        norm += h * (grid.r(i) + 0.5 * h) * d * d;
    }
    for (std::size_t i = 1; i <= grid.N(); ++i) {
        const double w = i == grid.N() ? 0.5 * h : h;
        norm += w * phi[i] * phi[i] / grid.r(i);
        sup = std::max(sup, std::abs(phi[i]));
    }
    return sup * sup - norm;
}

} // namespace pwave
