#include "pwave/radial_core.hpp"

#include "pwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pwave {

namespace {

void require_degree_minus_one(const ProfilePair& p) {
    if (p.degree != -1)
        fail(ErrorKind::unsupported_degree,
             "radial energy is defined for degree n = -1 only, got n = " + std::to_string(p.degree));
}

// Centered stencil of Delta_r = d^2/dr^2 + (1/r) d/dr and of d/dr at r.
struct Stencil {
    double lap_lo, lap_mid, lap_hi;
    double d_lo, d_hi;
};

Stencil stencil_at(double r, double h) {
    const double ih2 = 1.0 / (h * h);
    const double a = 1.0 / (2.0 * r * h);
    return {ih2 - a, -2.0 * ih2, ih2 + a, -1.0 / (2.0 * h), 1.0 / (2.0 * h)};
}

double lap(const Stencil& s, const std::vector<double>& f, std::size_t i) {
    return s.lap_lo * f[i - 1] + s.lap_mid * f[i] + s.lap_hi * f[i + 1];
}

double deriv(const Stencil& s, const std::vector<double>& f, std::size_t i) {
    return s.d_lo * f[i - 1] + s.d_hi * f[i + 1];
}

// Nonlinear right-hand sides of the raw system.
double nl_minus(double m, double p) { return m * (m * m - 1.0) + 2.0 * m * p * p; }
double nl_plus(double m, double p) { return p * (p * p - 1.0) + 2.0 * p * m * m; }

void check_shape(const ProfilePair& p) {
    require(p.fm.size() == p.grid.size() && p.fp.size() == p.grid.size(),
            "profile length must equal N+1");
}

} // namespace

double epot_renorm(double fm, double fp) {
    const double s = fm * fm + fp * fp - 1.0;
    return 0.5 * s * s + fm * fm * fp * fp;
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

EnergyBreakdown energy_radial(const ProfilePair& p) {
    require_degree_minus_one(p);
    check_shape(p);
    const auto& g = p.grid;
    const double h = g.h();
    EnergyBreakdown e;
    double cross = 0.0;
    for (std::size_t i = 0; i < g.N(); ++i) {
        const double dm = (p.fm[i + 1] - p.fm[i]) / h;
        const double dp = (p.fp[i + 1] - p.fp[i]) / h;
        for (std::size_t j : {i, i + 1}) {
            const double r = g.r(j);
            if (r == 0.0) continue;
            const double w = 0.5 * h * r;
            const double m = p.fm[j], q = p.fp[j];
            e.kinetic_diag += w * (dm * dm + dp * dp + (m * m + q * q) / (r * r));
            cross += w * (dm + m / r) * (dp + q / r);
            e.potential += w * epot_renorm(m, q);
        }
    }
    e.kinetic_cross = p.t * cross;
    e.total = e.kinetic_diag + e.kinetic_cross + e.potential;
    return e;
}

std::vector<double> energy_gradient(const ProfilePair& p) {
    require_degree_minus_one(p);
    check_shape(p);
    const auto& g = p.grid;
    const double h = g.h();
    const double t = p.t;
    std::vector<double> grad(2 * g.size(), 0.0);
    for (std::size_t i = 0; i < g.N(); ++i) {
        const double dm = (p.fm[i + 1] - p.fm[i]) / h;
        const double dp = (p.fp[i + 1] - p.fp[i]) / h;
        double gdm = 0.0, gdp = 0.0;
        for (std::size_t j : {i, i + 1}) {
            const double r = g.r(j);
            if (r == 0.0) continue;
            const double w = 0.5 * h * r;
            const double m = p.fm[j], q = p.fp[j];
            const double um = dm + m / r, up = dp + q / r;
            const double s = m * m + q * q - 1.0;
            gdm += w * (2.0 * dm + t * up);
            gdp += w * (2.0 * dp + t * um);
            grad[2 * j] += w * (2.0 * m / (r * r) + t * up / r + 2.0 * s * m + 2.0 * q * q * m);
            grad[2 * j + 1] += w * (2.0 * q / (r * r) + t * um / r + 2.0 * s * q + 2.0 * m * m * q);
        }
        grad[2 * (i + 1)] += gdm / h;
        grad[2 * i] -= gdm / h;
        grad[2 * (i + 1) + 1] += gdp / h;
        grad[2 * i + 1] -= gdp / h;
    }
    return grad;
}

std::vector<double> raw_residual(const ProfilePair& p) {
    check_shape(p);
    const auto& g = p.grid;
    const double h = g.h();
    const double t = p.t;
    const double n = p.degree;
    const double kin_m = n * n, kin_p = (n + 2.0) * (n + 2.0);
    const double mix = n * (n + 2.0), first = 2.0 * (n + 1.0);
    std::vector<double> res(2 * (g.N() - 1));
    for (std::size_t i = 1; i < g.N(); ++i) {
        const double r = g.r(i);
        const Stencil s = stencil_at(r, h);
        const double m = p.fm[i], q = p.fp[i];
        const double op_m = lap(s, p.fm, i) - kin_m / (r * r) * m;
        const double op_p = lap(s, p.fp, i) - kin_p / (r * r) * q;
        const double cross_m = lap(s, p.fp, i) + first / r * deriv(s, p.fp, i) + mix / (r * r) * q;
        const double cross_p = lap(s, p.fm, i) - first / r * deriv(s, p.fm, i) + mix / (r * r) * m;
        res[2 * (i - 1)] = nl_minus(m, q) - op_m - 0.5 * t * cross_m;
        res[2 * (i - 1) + 1] = nl_plus(m, q) - op_p - 0.5 * t * cross_p;
    }
    return res;
}

std::vector<double> residual(const ProfilePair& p) {
    check_shape(p);
    const double t = p.t;
    if (p.degree != -1) {
        auto raw = raw_residual(p);
        for (std::size_t k = 0; k + 1 < raw.size(); k += 2) {
            const double a = raw[k], b = raw[k + 1];
            raw[k] = a - 0.5 * t * b;
            raw[k + 1] = b - 0.5 * t * a;
        }
        return raw;
    }
    const auto& g = p.grid;
    const double h = g.h();
    const double tau = 1.0 - 0.25 * t * t;
    std::vector<double> res(2 * (g.N() - 1));
    for (std::size_t i = 1; i < g.N(); ++i) {
        const double r = g.r(i);
        const Stencil s = stencil_at(r, h);
        const double m = p.fm[i], q = p.fp[i];
        const double lm = lap(s, p.fm, i) - m / (r * r);
        const double lp = lap(s, p.fp, i) - q / (r * r);
        const double am = 2.0 * q * q + m * m - 1.0;
        const double ap = 2.0 * m * m + q * q - 1.0;
        res[2 * (i - 1)] = -tau * lm + m * am - 0.5 * t * q * ap;
        res[2 * (i - 1) + 1] = -tau * lp + q * ap - 0.5 * t * m * am;
    }
    return res;
}

BlockTridiagonal jacobian(const ProfilePair& p, SystemForm form) {
    check_shape(p);
    const auto& g = p.grid;
    const double h = g.h();
    const double t = p.t;
    const double n = p.degree;
    const double kin_m = n * n, kin_p = (n + 2.0) * (n + 2.0);
    const double mix = n * (n + 2.0), first = 2.0 * (n + 1.0);
    const std::size_t blocks = g.N() - 1;
    BlockTridiagonal jac(blocks);

    for (std::size_t i = 1; i < g.N(); ++i) {
        const std::size_t b = i - 1;
        const double r = g.r(i);
        const Stencil s = stencil_at(r, h);
        const double m = p.fm[i], q = p.fp[i];
        const double c_lo[2] = {s.lap_lo, s.d_lo};
        const double c_hi[2] = {s.lap_hi, s.d_hi};

        // raw blocks: row 0 = minus equation, row 1 = plus equation
        Block2 lo, mid, hi;
        lo(0, 0) = -c_lo[0];
        lo(0, 1) = -0.5 * t * (c_lo[0] + first / r * c_lo[1]);
        lo(1, 1) = -c_lo[0];
        lo(1, 0) = -0.5 * t * (c_lo[0] - first / r * c_lo[1]);
        hi(0, 0) = -c_hi[0];
        hi(0, 1) = -0.5 * t * (c_hi[0] + first / r * c_hi[1]);
        hi(1, 1) = -c_hi[0];
        hi(1, 0) = -0.5 * t * (c_hi[0] - first / r * c_hi[1]);
        mid(0, 0) = -(s.lap_mid - kin_m / (r * r)) + 3.0 * m * m - 1.0 + 2.0 * q * q;
        mid(0, 1) = -0.5 * t * (s.lap_mid + mix / (r * r)) + 4.0 * m * q;
        mid(1, 1) = -(s.lap_mid - kin_p / (r * r)) + 3.0 * q * q - 1.0 + 2.0 * m * m;
        mid(1, 0) = -0.5 * t * (s.lap_mid + mix / (r * r)) + 4.0 * m * q;

        if (form == SystemForm::diagonalized) {
            for (Block2* blk : {&lo, &mid, &hi}) {
                Block2 c = *blk;
                for (int col = 0; col < 2; ++col) {
                    (*blk)(0, col) = c(0, col) - 0.5 * t * c(1, col);
                    (*blk)(1, col) = c(1, col) - 0.5 * t * c(0, col);
                }
            }
        }
        jac.diag(b) = mid;
        if (b > 0) jac.lower(b) = lo;
        if (b + 1 < blocks) jac.upper(b) = hi;
    }
    return jac;
}

} // namespace pwave
