#include "pwave/asymptotics.hpp"

#include "pwave/errors.hpp"
#include "pwave/radial_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace pwave {

namespace {

using real = long double;

struct Series {
    // sum_k coef[k] r^{-2k}, k = 0..3
    real coef[4];

    real value(real r) const {
        const real u = 1.0L / (r * r);
        return coef[0] + u * (coef[1] + u * (coef[2] + u * coef[3]));
    }
    // tau (-Delta_r w + w/r^2); Delta_r r^{-m} = m^2 r^{-m-2}
    real linear_part(real r, real tau) const {
        real s = 0.0L, p = 1.0L / (r * r);
        const real u = p;
        for (int k = 0; k < 4; ++k) {
            const real m = 2.0L * k;
            s += coef[k] * (1.0L - m * m) * p;
            p *= u;
        }
        return tau * s;
    }
};

Series minus_series(const TailModel& m) {
    const real R6 = std::pow(static_cast<real>(m.R_ref), 6);
    return {{0.0L, m.a_minus, m.b_minus, m.c_minus * R6}}; // deviation from 1
}

Series plus_series(const TailModel& m) {
    const real R6 = std::pow(static_cast<real>(m.R_ref), 6);
    const real t = m.t;
    return {{0.0L, t * m.a_plus, t * m.b_plus, t * m.c_plus * R6}};
}

// Least squares of y on {(s/r)^2, (s/r)^4}; returns coefficients of r^-2, r^-4 and RMS misfit.
std::array<double, 3> fit_two_powers(const std::vector<double>& r, const std::vector<double>& y) {
    const Eigen::Index n = static_cast<Eigen::Index>(r.size());
    const double s = r.front();
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double u = (s / r[k]) * (s / r[k]);
        A(k, 0) = u;
        A(k, 1) = u * u;
        b(k) = y[k];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const double rms = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(n));
    return {c(0) * s * s, c(1) * s * s * s * s, rms};
}

double centered_derivative(const std::vector<double>& f, std::size_t i, double h) {
    return (f[i + 1] - f[i - 1]) / (2.0 * h);
}

double end_derivative(const std::vector<double>& f, double h) {
    const std::size_t N = f.size() - 1;
    return (3.0 * f[N] - 4.0 * f[N - 1] + f[N - 2]) / (2.0 * h);
}

} // namespace

double TailModel::w_minus(double r) const {
    return static_cast<double>(1.0L + minus_series(*this).value(r));
}

double TailModel::w_plus(double r) const { return static_cast<double>(plus_series(*this).value(r)); }

double TailModel::dw_minus(double r) const {
    const double R6 = std::pow(R_ref, 6);
    return -2.0 * a_minus / std::pow(r, 3) - 4.0 * b_minus / std::pow(r, 5) - 6.0 * c_minus * R6 / std::pow(r, 7);
}

double TailModel::dw_plus(double r) const {
    const double R6 = std::pow(R_ref, 6);
    return t * (-2.0 * a_plus / std::pow(r, 3) - 4.0 * b_plus / std::pow(r, 5) - 6.0 * c_plus * R6 / std::pow(r, 7));
}

std::pair<double, double> TailModel::residual(double r_in) const {
    const real r = r_in;
    const real tt = t;
    const real tau_l = 1.0L - 0.25L * tt * tt;
    const Series sm = minus_series(*this);
    const Series sp = plus_series(*this);
    const real u = sm.value(r); // w_- - 1
    const real wp = sp.value(r);
    const real wm = 1.0L + u;
    const real wm2m1 = u * (2.0L + u);
    // linear part of w_-: the constant 1 contributes tau / r^2
    const real lin_m = sm.linear_part(r, tau_l) + tau_l / (r * r);
    const real lin_p = sp.linear_part(r, tau_l);
    const real em = lin_m + wm * (2.0L * wp * wp + wm2m1) - 0.5L * tt * wp * (2.0L * wm2m1 + 1.0L + wp * wp);
    const real ep = lin_p + wp * (2.0L * wm2m1 + 1.0L + wp * wp) - 0.5L * tt * wm * (2.0L * wp * wp + wm2m1);
    return {static_cast<double>(em), static_cast<double>(ep)};
}

TailModel expansion_coefficients(double t) {
    TailModel m;
    m.t = t;
    const double tau = m.tau();
    const double t2 = t * t;
    // r^-2:  2a_- - t^2/2 a_+ = -tau,   -a_- + a_+ = 0
    Eigen::Matrix2d A;
    A << 2.0, -0.5 * t2, -1.0, 1.0;
    const Eigen::PartialPivLU<Eigen::Matrix2d> lu(A);
    const Eigen::Vector2d a = lu.solve(Eigen::Vector2d(-tau, 0.0));
    m.a_minus = a(0);
    m.a_plus = a(1);
    // r^-4: same matrix in (b_-, b_+), right-hand sides from the a-terms
    const double am = m.a_minus, ap = m.a_plus;
    const double rhs_m = -(-3.0 * tau * am + 3.0 * am * am - 2.0 * t2 * ap * am + 2.0 * t2 * ap * ap);
    const double rhs_p = -(-3.0 * tau * ap - 1.5 * am * am - t2 * ap * ap + 4.0 * ap * am);
    const Eigen::Vector2d b = lu.solve(Eigen::Vector2d(rhs_m, rhs_p));
    m.b_minus = b(0);
    m.b_plus = b(1);
    return m;
}

std::array<double, 4> coefficient_equations(const TailModel& m) {
    const double t2 = m.t * m.t, tau = m.tau();
    const double am = m.a_minus, ap = m.a_plus, bm = m.b_minus, bp = m.b_plus;
    return {
        2.0 * am - 0.5 * t2 * ap + tau,
        -am + ap,
        2.0 * bm - 0.5 * t2 * bp - 3.0 * tau * am + 3.0 * am * am - 2.0 * t2 * ap * am + 2.0 * t2 * ap * ap,
        bp - bm - 3.0 * tau * ap - 1.5 * am * am - t2 * ap * ap + 4.0 * ap * am,
    };
}

TailFit fit_tail(const ProfilePair& p, double r_lo, double r_hi, bool require_plus) {
    const auto& g = p.grid;
    require(r_lo > 0.0 && r_lo < r_hi, "fit window must satisfy 0 < r_lo < r_hi");
    require(r_hi <= g.R() * (1.0 + 1e-12), "fit window exceeds the grid radius");
    std::vector<double> r, ym, yp;
    for (std::size_t i = 1; i <= g.N(); ++i) {
        const double ri = g.r(i);
        if (ri < r_lo || ri > r_hi) continue;
        r.push_back(ri);
        ym.push_back(p.fm[i] - 1.0);
        yp.push_back(p.t > 0.0 ? p.fp[i] / p.t : p.fp[i]);
    }
    require(r.size() >= 20, "fit window holds " + std::to_string(r.size()) + " nodes, need at least 20");
    for (double y : ym) require(std::abs(y) < 0.1, "fit window starts inside the vortex core (|f_- - 1| >= 0.1)");
    if (require_plus) require(p.t > 0.0, "f_+ tail fit needs t > 0");

    TailFit fit;
    fit.r_lo = r_lo;
    fit.r_hi = r_hi;
    fit.nodes = r.size();
    const auto cm = fit_two_powers(r, ym);
    fit.a_minus = cm[0];
    fit.b_minus = cm[1];
    fit.residual_minus = cm[2];
    if (p.t > 0.0) {
        const auto cp = fit_two_powers(r, yp);
        fit.a_plus = cp[0];
        fit.b_plus = cp[1];
        fit.residual_plus = cp[2];
        fit.has_plus = true;
    }
    return fit;
}

TailModel barrier_model(double t, double delta, double R, BarrierKind kind) {
    TailModel m = expansion_coefficients(t);
    const double s = kind == BarrierKind::super ? 1.0 : -1.0;
    m.c_minus = s * delta;
    m.c_plus = 2.0 * s * delta;
    m.R_ref = R;
    return m;
}

BarrierCheck supersolution_residual(double t, double delta, double R, BarrierKind kind, std::size_t samples) {
    require(delta > 0.0 && delta < 1.0 / 32.0, "barrier parameter delta must lie in (0, 1/32)");
    require(R > 0.0, "barrier radius must be positive");
    require(t >= 0.0 && t <= 1.0, "coupling t must lie in [0,1]");
    require(samples >= 2, "need at least two samples");
    const TailModel m = barrier_model(t, delta, R, kind);
    BarrierCheck out;
    out.t = t;
    out.delta = delta;
    out.R = R;
    out.kind = kind;
    bool ok = true;
    for (std::size_t k = 0; k < samples; ++k) {
        const double r = R * std::pow(10.0, static_cast<double>(k) / static_cast<double>(samples - 1));
        const auto [em, ep] = m.residual(r);
        out.r.push_back(r);
        out.E_minus.push_back(em);
        out.E_plus.push_back(ep);
        if (kind == BarrierKind::super) ok = ok && em > 0.0 && ep > 0.0;
        else ok = ok && em < 0.0 && ep < 0.0;
    }
    out.verdict = ok;
    return out;
}

double find_validity_radius(double t, double delta, BarrierKind kind, double R_lo, double R_hi, double rtol) {
    require(R_lo > 0.0 && R_lo < R_hi, "need 0 < R_lo < R_hi");
    auto holds = [&](double R) { return supersolution_residual(t, delta, R, kind).verdict; };
    require(holds(R_hi), "barrier verdict fails at the upper search radius");
    if (holds(R_lo)) return R_lo;
    double lo = R_lo, hi = R_hi;
    while (hi - lo > rtol * hi) {
        const double mid = std::sqrt(lo * hi);
        (holds(mid) ? hi : lo) = mid;
    }
    return hi;
}

PohozaevReport pohozaev_residual(const ProfilePair& p) {
    if (p.t != 1.0 || p.degree != -1)
        fail(ErrorKind::unsupported, "Pohozaev identity is implemented for t = 1, n = -1 only");
    const auto& g = p.grid;
    const std::size_t N = g.N();
    const double h = g.h();

    std::vector<double> P(N + 1, 0.0), e(N + 1, 0.0);
    for (std::size_t i = 0; i <= N; ++i) e[i] = epot_renorm(p.fm[i], p.fp[i]);
    for (std::size_t i = 1; i < N; ++i) {
        const double r = g.r(i);
        const double dm = centered_derivative(p.fm, i, h), dp = centered_derivative(p.fp, i, h);
        const double m = p.fm[i], q = p.fp[i];
        P[i] = r * r * (dm * dm + dp * dp + dp * dm) - m * m - q * q - m * q;
    }

    PohozaevReport rep;
    for (std::size_t i = 2; i + 1 < N; ++i) {
        const double r = g.r(i);
        const double lhs = (P[i + 1] - P[i - 1]) / (2.0 * h);
        const double rhs = r * r * (e[i + 1] - e[i - 1]) / (2.0 * h);
        rep.r.push_back(r);
        rep.mismatch.push_back(lhs - rhs);
    }
    rep.sup_mismatch = sup_norm(rep.mismatch);

    rep.potential_integral = 2.0 * energy_radial(p).potential;
    const double R = g.R();
    const double dm = end_derivative(p.fm, h), dp = end_derivative(p.fp, h);
    const double m = p.fm[N], q = p.fp[N];
    const double K = dm * dm + dp * dp + dm * dp;
    rep.boundary_exact = R * R * e[N] - R * R * K + m * m + q * q + m * q;
    rep.boundary_derivative_form = 1.0 - R * R * K;
    rep.boundary_literal_form = 1.0 - R * R * (dm * dm + dp * dp + m * q);
    return rep;
}

DerivativeTailReport derivative_tail_check(const ProfilePair& p) {
    const auto& g = p.grid;
    require(g.R() >= 50.0, "derivative tail check needs R >= 50");
    const double h = g.h();
    DerivativeTailReport rep;
    rep.r_lo = 0.5 * g.R();
    rep.r_hi = 0.9 * g.R();
    std::vector<double> r, ym, yp;
    for (std::size_t i = 1; i < g.N(); ++i) {
        const double ri = g.r(i);
        if (ri < rep.r_lo || ri > rep.r_hi) continue;
        const double r3 = ri * ri * ri;
        const double dm = centered_derivative(p.fm, i, h);
        const double dp = centered_derivative(p.fp, i, h);
        r.push_back(ri);
        ym.push_back(r3 * dm);
        rep.bound_minus = std::max(rep.bound_minus, ri * ri * ri * ri * ri * std::abs(dm - 1.0 / r3));
        if (p.t > 0.0) {
            yp.push_back(r3 * dp / p.t);
            rep.bound_plus = std::max(rep.bound_plus, ri * ri * ri * ri * ri * std::abs(dp - p.t / r3) / p.t);
        }
    }
    require(r.size() >= 20, "derivative window holds too few nodes");

    // r^3 f' = lead + corr r^-2: reuse the two-power fit on y - lead by fitting {1, r^-2}
    auto fit_const = [](const std::vector<double>& x, const std::vector<double>& y) {
        const Eigen::Index n = static_cast<Eigen::Index>(x.size());
        Eigen::MatrixXd A(n, 2);
        Eigen::VectorXd b(n);
        const double s = x.front();
        for (Eigen::Index k = 0; k < n; ++k) {
            A(k, 0) = 1.0;
            A(k, 1) = (s / x[k]) * (s / x[k]);
            b(k) = y[k];
        }
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
        return std::pair<double, double>(c(0), c(1) * s * s);
    };
    std::tie(rep.lead_minus, rep.corr_minus) = fit_const(r, ym);
    if (p.t > 0.0) {
        std::tie(rep.lead_plus, rep.corr_plus) = fit_const(r, yp);
        rep.has_plus = true;
    }
    bool mono = true;
    for (std::size_t k = 1; k < ym.size(); ++k)
        if (std::abs(ym[k] - 1.0) > std::abs(ym[k - 1] - 1.0)) mono = false;
    rep.monotone_minus = mono;
    return rep;
}

} // namespace pwave
