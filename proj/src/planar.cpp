#include "pwave/planar.hpp"

#include "pwave/errors.hpp"
#include "pwave/solver_errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace pwave {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Trip = Eigen::Triplet<double>;

constexpr cplx I{0.0, 1.0};

void require_nu(double nu) { require(std::abs(nu) < 1.0, "anisotropy nu must lie in (-1, 1)"); }

// Value and Cartesian derivative operators from nodes to quadrature points
// (r_{i+1/2}, theta_j), q = i * n_theta + j.
struct Ops {
    SpMat V, Dx, Dy;
    Vec w;      // quadrature weights
    Vec lumped; // nodal areas V^T w
};

Ops build_ops(const DiskGrid& g) {
    const std::size_t nt = g.n_theta(), nr = g.n_r();
    const std::size_t nq = nr * nt, nn = g.num_nodes();
    const double dr = g.dr(), dth = g.dtheta();
    const double kth = 1.0 / (2.0 * std::sin(dth));
    std::vector<Trip> tv, tx, ty;
    tv.reserve(2 * nq);
    tx.reserve(6 * nq);
    ty.reserve(6 * nq);
    Ops ops;
    ops.w.resize(static_cast<Eigen::Index>(nq));
    for (std::size_t i = 0; i < nr; ++i) {
        const double r = (static_cast<double>(i) + 0.5) * dr;
        for (std::size_t j = 0; j < nt; ++j) {
            const auto q = static_cast<int>(i * nt + j);
            const double c = std::cos(g.theta(j)), s = std::sin(g.theta(j));
            const auto a = static_cast<int>(g.node(i, j)), b = static_cast<int>(g.node(i + 1, j));
            tv.emplace_back(q, a, 0.5);
            tv.emplace_back(q, b, 0.5);
            // d/dr
            tx.emplace_back(q, b, c / dr);
            tx.emplace_back(q, a, -c / dr);
            ty.emplace_back(q, b, s / dr);
            ty.emplace_back(q, a, -s / dr);
            // d/dtheta, averaged over the two rings (zero at the center)
            for (std::size_t ring : {i, i + 1}) {
                if (ring == 0) continue;
                const auto up = static_cast<int>(g.node(ring, j + 1));
                const auto dn = static_cast<int>(g.node(ring, j + nt - 1));
                const double k = 0.5 * kth / r;
                tx.emplace_back(q, up, -s * k);
                tx.emplace_back(q, dn, s * k);
                ty.emplace_back(q, up, c * k);
                ty.emplace_back(q, dn, -c * k);
            }
            ops.w[q] = r * dr * dth;
        }
    }
    const auto rows = static_cast<Eigen::Index>(nq), cols = static_cast<Eigen::Index>(nn);
    ops.V.resize(rows, cols);
    ops.Dx.resize(rows, cols);
    ops.Dy.resize(rows, cols);
    ops.V.setFromTriplets(tv.begin(), tv.end());
    ops.Dx.setFromTriplets(tx.begin(), tx.end());
    ops.Dy.setFromTriplets(ty.begin(), ty.end());
    ops.lumped = ops.V.transpose() * ops.w;
    return ops;
}

// Components (Re eta_-, Im eta_-, Re eta_+, Im eta_+).
using Comp = std::array<Vec, 4>;

Comp to_comp(const PlanarField& f) {
    const auto n = static_cast<Eigen::Index>(f.grid.num_nodes());
    Comp x;
    for (auto& v : x) v.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        x[0][k] = f.eta_minus[k].real();
        x[1][k] = f.eta_minus[k].imag();
        x[2][k] = f.eta_plus[k].real();
        x[3][k] = f.eta_plus[k].imag();
    }
    return x;
}

void from_comp(const Comp& x, PlanarField& f) {
    for (std::size_t k = 0; k < f.grid.num_nodes(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        f.eta_minus[k] = {x[0][e], x[1][e]};
        f.eta_plus[k] = {x[2][e], x[3][e]};
    }
}

struct QuadValues {
    Comp val, dx, dy;
};

QuadValues at_quadrature(const Ops& ops, const Comp& x) {
    QuadValues q;
    for (int c = 0; c < 4; ++c) {
        q.val[c] = ops.V * x[c];
        q.dx[c] = ops.Dx * x[c];
        q.dy[c] = ops.Dy * x[c];
    }
    return q;
}

PointGradient point_gradient(const QuadValues& q, Eigen::Index k) {
    return {{q.dx[0][k], q.dx[1][k]}, {q.dy[0][k], q.dy[1][k]}, {q.dx[2][k], q.dx[3][k]}, {q.dy[2][k], q.dy[3][k]}};
}

PlanarEnergy energy_eval(const Ops& ops, const Comp& x, double nu, double kappa) {
    const QuadValues q = at_quadrature(ops, x);
    PlanarEnergy e;
    for (Eigen::Index k = 0; k < ops.w.size(); ++k) {
        e.kinetic += ops.w[k] * ekin_squares(point_gradient(q, k), nu);
        e.potential += ops.w[k] * epot_planar({q.val[0][k], q.val[1][k]}, {q.val[2][k], q.val[3][k]}, nu);
    }
    e.potential *= kappa * kappa;
    e.total = e.kinetic + e.potential;
    return e;
}

Comp gradient_eval(const Ops& ops, const Comp& x, double nu, double kappa) {
    const QuadValues q = at_quadrature(ops, x);
    const Eigen::Index nq = ops.w.size();
    Comp gv, gx, gy;
    for (int c = 0; c < 4; ++c) {
        gv[c].resize(nq);
        gx[c].resize(nq);
        gy[c].resize(nq);
    }
    const double k2 = kappa * kappa;
    for (Eigen::Index k = 0; k < nq; ++k) {
        const double w = ops.w[k];
        const PointGradient d = point_gradient(q, k);
        const cplx A = d.dx_plus, B = d.dx_minus, C = d.dy_plus, D = d.dy_minus;
        const cplx gA = (1.0 + nu) * (A + B) + (1.0 - nu) * (A + I * D);
        const cplx gB = (1.0 + nu) * (A + B) - I * (1.0 - nu) * (C + I * B);
        const cplx gC = (1.0 + nu) * (C - D) + (1.0 - nu) * (C + I * B);
        const cplx gD = -(1.0 + nu) * (C - D) - I * (1.0 - nu) * (A + I * D);
        const cplx em{q.val[0][k], q.val[1][k]}, ep{q.val[2][k], q.val[3][k]};
        const double nm = std::norm(em), np = std::norm(ep);
        const cplx gm = k2 * (2.0 * (nm - 1.0) * em + 4.0 * np * em + 2.0 * nu * std::conj(em) * ep * ep);
        const cplx gp = k2 * (2.0 * (np - 1.0) * ep + 4.0 * nm * ep + 2.0 * nu * std::conj(ep) * em * em);
        gx[0][k] = w * gB.real();
        gx[1][k] = w * gB.imag();
        gx[2][k] = w * gA.real();
        gx[3][k] = w * gA.imag();
        gy[0][k] = w * gD.real();
        gy[1][k] = w * gD.imag();
        gy[2][k] = w * gC.real();
        gy[3][k] = w * gC.imag();
        gv[0][k] = w * gm.real();
        gv[1][k] = w * gm.imag();
        gv[2][k] = w * gp.real();
        gv[3][k] = w * gp.imag();
    }
    Comp g;
    for (int c = 0; c < 4; ++c)
        g[c] = ops.V.transpose() * gv[c] + ops.Dx.transpose() * gx[c] + ops.Dy.transpose() * gy[c];
    return g;
}

// Discrete Fourier coefficient (1/N) sum_j u_j e^{-i k theta_j}.
cplx dft(const std::vector<cplx>& u, int k) {
    const auto n = u.size();
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        s += u[j] * std::polar(1.0, -static_cast<double>(k) * th);
    }
    return s / static_cast<double>(n);
}

std::vector<cplx> ring_values(const PlanarField& f, const std::vector<cplx>& eta, std::size_t i) {
    std::vector<cplx> out(f.grid.n_theta());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = eta[f.grid.node(i, j)];
    return out;
}

PointGradient nodal_gradient(const PlanarField& f, std::size_t node) {
    const DiskGrid& g = f.grid;
    const std::size_t nt = g.n_theta();
    const std::size_t i = g.ring_of(node), j = g.angle_of(node);
    const double dr = g.dr();
    auto grad_of = [&](const std::vector<cplx>& u, cplx& dx, cplx& dy) {
        if (i == 0) {
            cplx sx{0.0, 0.0}, sy{0.0, 0.0};
            for (std::size_t k = 0; k < nt; ++k) {
                const cplx v = u[g.node(1, k)] - u[0];
                sx += v * std::cos(g.theta(k));
                sy += v * std::sin(g.theta(k));
            }
            const double scale = 2.0 / (static_cast<double>(nt) * g.r(1));
            dx = scale * sx;
            dy = scale * sy;
            return;
        }
        cplx ur;
        if (i < g.n_r())
            ur = (u[g.node(i + 1, j)] - u[g.node(i - 1, j)]) / (2.0 * dr);
        else
            ur = (3.0 * u[node] - 4.0 * u[g.node(i - 1, j)] + u[g.node(i - 2, j)]) / (2.0 * dr);
        const cplx ut = (u[g.node(i, j + 1)] - u[g.node(i, j + nt - 1)]) / (2.0 * std::sin(g.dtheta()));
        const double r = g.r(i), c = std::cos(g.theta(j)), s = std::sin(g.theta(j));
        dx = c * ur - s / r * ut;
        dy = s * ur + c / r * ut;
    };
    PointGradient d;
    grad_of(f.eta_minus, d.dx_minus, d.dy_minus);
    grad_of(f.eta_plus, d.dx_plus, d.dy_plus);
    return d;
}

void check_field(const PlanarField& f) {
    require(f.eta_minus.size() == f.grid.num_nodes() && f.eta_plus.size() == f.grid.num_nodes(),
            "field length must equal the number of disk nodes");
}

// Harmonic extension of rim data, mode by mode.
std::vector<cplx> harmonic_extension(const DiskGrid& g, const std::vector<cplx>& rim) {
    const int nt = static_cast<int>(g.n_theta());
    std::vector<cplx> coeff(static_cast<std::size_t>(nt));
    for (int k = -nt / 2 + 1; k <= nt / 2; ++k) coeff[static_cast<std::size_t>(k + nt / 2 - 1)] = dft(rim, k);
    std::vector<cplx> out(g.num_nodes());
    out[0] = coeff[static_cast<std::size_t>(nt / 2 - 1)];
    for (std::size_t i = 1; i <= g.n_r(); ++i) {
        const double rho = g.r(i) / g.R();
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            cplx s{0.0, 0.0};
            for (int k = -nt / 2 + 1; k <= nt / 2; ++k)
                s += coeff[static_cast<std::size_t>(k + nt / 2 - 1)] * std::pow(rho, std::abs(k)) *
                     std::polar(1.0, static_cast<double>(k) * g.theta(j));
            out[g.node(i, j)] = s;
        }
    }
    for (std::size_t j = 0; j < g.n_theta(); ++j) out[g.node(g.n_r(), j)] = rim[j];
    return out;
}

// 8 real derivative components: (dx Re-, dx Im-, dx Re+, dx Im+, dy Re-, dy Im-, dy Re+, dy Im+).
PointGradient from_reals(const std::array<double, 8>& a) {
    return {{a[0], a[1]}, {a[4], a[5]}, {a[2], a[3]}, {a[6], a[7]}};
}

Eigen::Matrix<double, 8, 8> kinetic_matrix(double nu) {
    Eigen::Matrix<double, 8, 8> Q;
    auto e = [&](int a, int b) {
        std::array<double, 8> v{};
        v[static_cast<std::size_t>(a)] += 1.0;
        if (b >= 0) v[static_cast<std::size_t>(b)] += 1.0;
        return ekin_squares(from_reals(v), nu);
    };
    for (int a = 0; a < 8; ++a) {
        Q(a, a) = e(a, -1);
        for (int b = 0; b < a; ++b) Q(a, b) = Q(b, a) = 0.5 * (e(a, b) - e(a, -1) - e(b, -1));
    }
    return Q;
}

struct CoercivityOps {
    SpMat K, M;
};

CoercivityOps coercivity_ops(const DiskGrid& g, double nu) {
    const Ops ops = build_ops(g);
    const auto n_free = static_cast<Eigen::Index>(1 + (g.n_r() - 1) * g.n_theta());
    const Eigen::Index nq = ops.w.size();
    const Eigen::Matrix<double, 8, 8> Q = kinetic_matrix(nu);

    // 8 derivative reals per quadrature point, 4 DOFs per free node
    std::vector<Trip> td, tv;
    for (int dir = 0; dir < 2; ++dir) {
        const SpMat& D = dir == 0 ? ops.Dx : ops.Dy;
        for (Eigen::Index col = 0; col < D.outerSize(); ++col)
            for (SpMat::InnerIterator it(D, col); it; ++it) {
                if (it.col() >= n_free) continue;
                for (int c = 0; c < 4; ++c)
                    td.emplace_back(static_cast<int>(8 * it.row() + 4 * dir + c), static_cast<int>(4 * it.col() + c),
                                    it.value());
            }
    }
    for (Eigen::Index col = 0; col < ops.V.outerSize(); ++col)
        for (SpMat::InnerIterator it(ops.V, col); it; ++it) {
            if (it.col() >= n_free) continue;
            for (int c = 0; c < 4; ++c)
                tv.emplace_back(static_cast<int>(4 * it.row() + c), static_cast<int>(4 * it.col() + c), it.value());
        }
    SpMat Dop(8 * nq, 4 * n_free), Vop(4 * nq, 4 * n_free);
    Dop.setFromTriplets(td.begin(), td.end());
    Vop.setFromTriplets(tv.begin(), tv.end());

    std::vector<Trip> tq, tw8, tw4;
    for (Eigen::Index k = 0; k < nq; ++k) {
        const double w = ops.w[k];
        for (int a = 0; a < 8; ++a) {
            tw8.emplace_back(static_cast<int>(8 * k + a), static_cast<int>(8 * k + a), w);
            for (int b = 0; b < 8; ++b)
                if (Q(a, b) != 0.0) tq.emplace_back(static_cast<int>(8 * k + a), static_cast<int>(8 * k + b), w * Q(a, b));
        }
        for (int c = 0; c < 4; ++c) tw4.emplace_back(static_cast<int>(4 * k + c), static_cast<int>(4 * k + c), w);
    }
    SpMat Wq(8 * nq, 8 * nq), W8(8 * nq, 8 * nq), W4(4 * nq, 4 * nq);
    Wq.setFromTriplets(tq.begin(), tq.end());
    W8.setFromTriplets(tw8.begin(), tw8.end());
    W4.setFromTriplets(tw4.begin(), tw4.end());

    CoercivityOps out;
    out.K = SpMat(Dop.transpose() * Wq * Dop);
    out.M = SpMat(Dop.transpose() * W8 * Dop) + SpMat(Vop.transpose() * W4 * Vop);
    return out;
}

} // namespace

DiskGrid::DiskGrid(double R, std::size_t n_r, std::size_t n_theta)
    : R_(R), n_r_(n_r), n_theta_(n_theta), dtheta_(2.0 * std::numbers::pi / static_cast<double>(n_theta)) {
    require(std::isfinite(R) && R > 0.0, "disk radius must be positive");
    require(n_r >= 16, "disk mesh needs N_r >= 16");
    require(n_theta >= 32 && n_theta % 2 == 0, "disk mesh needs an even N_theta >= 32");
}

PlanarField PlanarField::zeros(const DiskGrid& g) {
    return PlanarField{g, std::vector<cplx>(g.num_nodes()), std::vector<cplx>(g.num_nodes())};
}

std::vector<cplx> PlanarField::rim_minus() const { return ring_values(*this, eta_minus, grid.n_r()); }
std::vector<cplx> PlanarField::rim_plus() const { return ring_values(*this, eta_plus, grid.n_r()); }

PlanarField sample_field(const DiskGrid& g, const std::function<cplx(double, double)>& minus,
                         const std::function<cplx(double, double)>& plus) {
    PlanarField f = PlanarField::zeros(g);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
        const double r = g.r(g.ring_of(k)), th = g.theta(g.angle_of(k));
        const double x = r * std::cos(th), y = r * std::sin(th);
        f.eta_minus[k] = minus(x, y);
        f.eta_plus[k] = plus(x, y);
    }
    return f;
}

PlanarField embed_radial(const DiskGrid& g, const ProfilePair& p) {
    p.validate();
    require(g.R() <= p.grid.R() * (1.0 + 1e-12), "disk radius exceeds the radial domain");
    const int n = p.degree;
    auto interp = [&](const std::vector<double>& f, double r) {
        const std::size_t i = p.grid.index_below(r);
        if (i >= p.grid.N()) return f[p.grid.N()];
        const double s = (r - p.grid.r(i)) / p.grid.h();
        return (1.0 - s) * f[i] + s * f[i + 1];
    };
    PlanarField out = PlanarField::zeros(g);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
        const double r = g.r(g.ring_of(k)), th = g.theta(g.angle_of(k));
        out.eta_minus[k] = interp(p.fm, r) * std::polar(1.0, n * th);
        out.eta_plus[k] = interp(p.fp, r) * std::polar(1.0, (n + 2) * th);
    }
    return out;
}

double ekin_raw(const PointGradient& d, double nu) {
    auto dot = [](cplx a, cplx b) { return (a * std::conj(b)).real(); };
    const cplx pi_minus_plus = d.dx_plus - I * d.dy_plus;   // Pi_- eta_+
    const cplx pi_plus_minus = d.dx_minus + I * d.dy_minus; // Pi_+ eta_-
    const cplx pi_plus_plus = d.dx_plus + I * d.dy_plus;
    const cplx pi_minus_minus = d.dx_minus - I * d.dy_minus;
    return std::norm(d.dx_plus) + std::norm(d.dy_plus) + std::norm(d.dx_minus) + std::norm(d.dy_minus) +
           dot(pi_minus_plus, pi_plus_minus) + nu * dot(pi_plus_plus, pi_minus_minus);
}

double ekin_squares(const PointGradient& d, double nu) {
    const double p = 0.5 * (1.0 + nu), m = 0.5 * (1.0 - nu);
    return p * std::norm(d.dx_plus + d.dx_minus) + p * std::norm(d.dy_plus - d.dy_minus) +
           m * std::norm(d.dy_plus + I * d.dx_minus) + m * std::norm(d.dx_plus + I * d.dy_minus);
}

double epot_planar(cplx eta_minus, cplx eta_plus, double nu) {
    const double a = std::norm(eta_minus), b = std::norm(eta_plus);
    const cplx sq = eta_plus * eta_plus * std::conj(eta_minus * eta_minus);
    return 0.5 * (b - 1.0) * (b - 1.0) + 0.5 * (a - 1.0) * (a - 1.0) + 2.0 * a * b + nu * sq.real() - 0.5;
}

std::vector<double> kinetic_density(const PlanarField& f, double nu, KineticForm form) {
    require_nu(nu);
    check_field(f);
    std::vector<double> out(f.grid.num_nodes());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const PointGradient d = nodal_gradient(f, k);
        out[k] = form == KineticForm::raw ? ekin_raw(d, nu) : ekin_squares(d, nu);
    }
    return out;
}

std::vector<double> potential_density(const PlanarField& f, double nu, double kappa) {
    require_nu(nu);
    check_field(f);
    std::vector<double> out(f.grid.num_nodes());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = kappa * kappa * epot_planar(f.eta_minus[k], f.eta_plus[k], nu);
    return out;
}

PlanarEnergy planar_energy(const PlanarField& f, double nu, double kappa) {
    require_nu(nu);
    check_field(f);
    return energy_eval(build_ops(f.grid), to_comp(f), nu, kappa);
}

std::vector<double> planar_energy_gradient(const PlanarField& f, double nu, double kappa) {
    require_nu(nu);
    check_field(f);
    const Comp g = gradient_eval(build_ops(f.grid), to_comp(f), nu, kappa);
    std::vector<double> out(4 * f.grid.num_nodes());
    for (std::size_t k = 0; k < f.grid.num_nodes(); ++k)
        for (int c = 0; c < 4; ++c) out[4 * k + static_cast<std::size_t>(c)] = g[c][static_cast<Eigen::Index>(k)];
    return out;
}

KernelCheck kernel_check(const std::vector<cplx>& g_minus, const std::vector<cplx>& g_plus, double R, double rtol) {
    require(!g_minus.empty() && g_minus.size() == g_plus.size(), "rim data must have matching nonzero length");
    require(R > 0.0, "disk radius must be positive");
    const std::size_t n = g_minus.size();
    const cplx c_plus = dft(g_plus, 0), c_minus = dft(g_minus, 0);
    const cplx alpha_R = 0.5 * (dft(g_plus, 1) - dft(g_minus, -1));
    double scale = 0.0, defect = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        const cplx fp = c_plus + alpha_R * std::polar(1.0, th);
        const cplx fm = c_minus - alpha_R * std::polar(1.0, -th);
        defect = std::max({defect, std::abs(g_plus[j] - fp), std::abs(g_minus[j] - fm)});
        scale = std::max({scale, std::abs(g_plus[j]), std::abs(g_minus[j])});
    }
    KernelCheck out;
    out.alpha = alpha_R / R;
    out.defect = scale > 0.0 ? defect / scale : 0.0;
    out.kernel_form = scale > 0.0 && out.defect <= rtol && std::abs(alpha_R) > rtol * scale;
    return out;
}

void PlanarConfig::validate() const {
    require(tol > 0.0, "planar tolerance must be positive");
    require(max_iters > 0, "planar max_iters must be positive");
    require(max_backtracks > 0, "planar max_backtracks must be positive");
}

FourierDiagnostics fourier_modes(const PlanarField& f, int max_mode) {
    require(max_mode >= 1, "max_mode must be at least 1");
    check_field(f);
    const DiskGrid& g = f.grid;
    FourierDiagnostics out;
    out.max_mode = max_mode;
    out.mass_minus.assign(static_cast<std::size_t>(2 * max_mode + 1), 0.0);
    out.mass_plus.assign(static_cast<std::size_t>(2 * max_mode + 1), 0.0);
    double total = 0.0;
    for (std::size_t i = 1; i <= g.n_r(); ++i) {
        const double w = 2.0 * std::numbers::pi * g.r(i) * g.dr() * (i == g.n_r() ? 0.5 : 1.0);
        const auto um = ring_values(f, f.eta_minus, i), up = ring_values(f, f.eta_plus, i);
        for (int k = -max_mode; k <= max_mode; ++k) {
            out.mass_minus[static_cast<std::size_t>(k + max_mode)] += w * std::norm(dft(um, k));
            out.mass_plus[static_cast<std::size_t>(k + max_mode)] += w * std::norm(dft(up, k));
        }
        for (std::size_t j = 0; j < um.size(); ++j)
            total += w * (std::norm(um[j]) + std::norm(up[j])) / static_cast<double>(um.size());
    }
    const double eq = out.mass_minus[static_cast<std::size_t>(max_mode - 1)] +
                      out.mass_plus[static_cast<std::size_t>(max_mode + 1)];
    out.equivariant_fraction = total > 0.0 ? eq / total : 0.0;
    return out;
}

PlanarResult minimize_planar(const DiskGrid& g, const std::vector<cplx>& g_minus, const std::vector<cplx>& g_plus,
                             double nu, double kappa, const PlanarConfig& cfg, const PlanarField* init) {
    require_nu(nu);
    cfg.validate();
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
    require(g_minus.size() == g.n_theta() && g_plus.size() == g.n_theta(), "rim data must have N_theta entries");
    const KernelCheck kc = kernel_check(g_minus, g_plus, g.R());
    if (kc.kernel_form)
        fail(ErrorKind::ill_posed_boundary_data,
             "rim data is the trace of a kernel field (c_+ + alpha z, c_- - alpha conj z), |alpha| = " +
                 std::to_string(std::abs(kc.alpha)));

    PlanarField field = PlanarField::zeros(g);
    if (init != nullptr) {
        require(init->grid == g, "initial field lives on a different disk mesh");
        check_field(*init);
        field = *init;
    } else {
        field.eta_minus = harmonic_extension(g, g_minus);
        field.eta_plus = harmonic_extension(g, g_plus);
    }
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        field.eta_minus[g.node(g.n_r(), j)] = g_minus[j];
        field.eta_plus[g.node(g.n_r(), j)] = g_plus[j];
    }

    const Ops ops = build_ops(g);
    const auto n_free = static_cast<Eigen::Index>(1 + (g.n_r() - 1) * g.n_theta());
    // H^1 Gram matrix on the free nodes as preconditioner
    const SpMat W = SpMat(Eigen::VectorXd(ops.w).asDiagonal());
    const SpMat S_full = SpMat(ops.V.transpose() * W * ops.V) + SpMat(ops.Dx.transpose() * W * ops.Dx) +
                         SpMat(ops.Dy.transpose() * W * ops.Dy);
    const SpMat S = S_full.topLeftCorner(n_free, n_free);
    Eigen::SimplicialLDLT<SpMat> pre(S);
    if (pre.info() != Eigen::Success) fail(ErrorKind::numerical_breakdown, "planar preconditioner factorization failed");

    Comp x = to_comp(field);
    auto free_part = [&](const Comp& v) {
        Comp out;
        for (int c = 0; c < 4; ++c) out[c] = v[c].head(n_free);
        return out;
    };
    auto grad_sup = [&](const Comp& gr) {
        double m = 0.0;
        for (int c = 0; c < 4; ++c)
            for (Eigen::Index k = 0; k < n_free; ++k) m = std::max(m, std::abs(gr[c][k]) / ops.lumped[k]);
        return m;
    };

    PlanarResult res{field, {}, {}, {}};
    SolveReport& rep = res.report;
    double E = energy_eval(ops, x, nu, kappa).total;
    Comp gr = free_part(gradient_eval(ops, x, nu, kappa));
    res.energy_trace.push_back(E);
    double gnorm = grad_sup(gr);
    rep.history.push_back(gnorm);
    double alpha = 1.0;

    for (int it = 0; it < cfg.max_iters && gnorm > cfg.tol; ++it) {
        Comp p;
        double pg = 0.0;
        for (int c = 0; c < 4; ++c) {
            p[c] = pre.solve(gr[c]);
            pg += p[c].dot(gr[c]);
        }
        Comp trial = x;
        double Et = 0.0;
        int back = 0;
        for (;;) {
            for (int c = 0; c < 4; ++c) trial[c].head(n_free) = x[c].head(n_free) - alpha * p[c];
            Et = energy_eval(ops, trial, nu, kappa).total;
            if (std::isfinite(Et) && Et <= E + 1e-14 * std::abs(E)) break;
            if (++back > cfg.max_backtracks) {
                rep.iterations = it;
                rep.final_residual = gnorm;
                throw SolverFailure("planar descent could not decrease the energy", rep);
            }
            alpha *= 0.5;
            ++rep.damping_events;
        }
        const Comp gnew = free_part(gradient_eval(ops, trial, nu, kappa));
        double sy = 0.0;
        for (int c = 0; c < 4; ++c) sy += -alpha * p[c].dot(gnew[c] - gr[c]);
        const double sSs = alpha * alpha * pg;
        alpha = sy > 0.0 ? sSs / sy : 2.0 * alpha;

        x = std::move(trial);
        gr = gnew;
        E = Et;
        gnorm = grad_sup(gr);
        res.energy_trace.push_back(E);
        rep.history.push_back(gnorm);
        rep.iterations = it + 1;
    }
    rep.final_residual = gnorm;
    rep.converged = gnorm <= cfg.tol;
    rep.diagnostics["energy"] = E;
    from_comp(x, res.field);
    res.fourier = fourier_modes(res.field);
    rep.diagnostics["equivariant_fraction"] = res.fourier.equivariant_fraction;
    if (!rep.converged) throw SolverFailure("planar descent did not reach the gradient tolerance", rep);
    return res;
}

double coercivity_estimate(const DiskGrid& g, double nu, double tol, int max_iters) {
    require_nu(nu);
    const CoercivityOps co = coercivity_ops(g, nu);
    Eigen::SimplicialLDLT<SpMat> solver(co.K);
    if (solver.info() != Eigen::Success) fail(ErrorKind::numerical_breakdown, "kinetic form is singular on the mesh");

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec x(co.K.rows());
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = u(rng);
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vec y = solver.solve(co.M * x);
        const double norm = std::sqrt(y.dot(co.M * y));
        if (!std::isfinite(norm) || norm == 0.0) fail(ErrorKind::numerical_breakdown, "coercivity iteration broke down");
        x = y / norm;
        const double next = x.dot(co.K * x);
        if (it > 0 && std::abs(next - lambda) <= tol * next) return next;
        lambda = next;
    }
    fail(ErrorKind::numerical_breakdown, "coercivity inverse iteration did not converge");
}

DenseCoercivityPair coercivity_matrices(const DiskGrid& g, double nu) {
    require_nu(nu);
    const CoercivityOps co = coercivity_ops(g, nu);
    DenseCoercivityPair out;
    out.n = static_cast<std::size_t>(co.K.rows());
    const Eigen::MatrixXd K(co.K), M(co.M);
    out.K.resize(out.n * out.n);
    out.M.resize(out.n * out.n);
    for (std::size_t a = 0; a < out.n; ++a)
        for (std::size_t b = 0; b < out.n; ++b) {
            out.K[a * out.n + b] = K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            out.M[a * out.n + b] = M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    return out;
}

double relative_l2_difference(const PlanarField& a, const PlanarField& b) {
    require(a.grid == b.grid, "fields live on different disk meshes");
    check_field(a);
    check_field(b);
    const Ops ops = build_ops(a.grid);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.grid.num_nodes(); ++k) {
        const double m = ops.lumped[static_cast<Eigen::Index>(k)];
        num += m * (std::norm(a.eta_minus[k] - b.eta_minus[k]) + std::norm(a.eta_plus[k] - b.eta_plus[k]));
        den += m * (std::norm(b.eta_minus[k]) + std::norm(b.eta_plus[k]));
    }
    require(den > 0.0, "reference field has zero L2 norm");
    return std::sqrt(num / den);
}

} // namespace pwave
