#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pwave/asymptotics.hpp"
#include "pwave/block_tridiagonal.hpp"
#include "pwave/classical_gl.hpp"
#include "pwave/newton.hpp"
#include "pwave/pwave_solver.hpp"
#include "pwave/radial_core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace pwave;

namespace {

ProfilePair smooth_pair(const RadialGrid& g, double t, int n = -1) {
    ProfilePair p = ProfilePair::zeros(g, t, n);
    for (std::size_t i = 1; i <= g.N(); ++i) {
        const double r = g.r(i);
        p.fm[i] = std::tanh(r) * (1.0 + 0.1 * std::sin(r));
        p.fp[i] = -0.3 * r * std::exp(-0.5 * r);
    }
    return p;
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected pwave::Error");
    return ErrorKind::invalid_argument;
}

} // namespace

TEST_CASE("grid construction") {
    const RadialGrid a = build_grid(10.0, 1000);
    CHECK(a.h() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(a.r(500) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(a.r(0) == 0.0);
    CHECK(a.r(a.N()) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(build_grid(100.0, 10000).h() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(kind_of([] { build_grid(1.0, 8); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { build_grid(0.0, 100); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { build_grid(-3.0, 100); }) == ErrorKind::invalid_argument);
}

TEST_CASE("renormalized potential") {
    CHECK(epot_renorm(1.0, 0.0) == 0.0);
    CHECK(epot_renorm(0.0, 0.0) == doctest::Approx(0.5));
    CHECK(epot_renorm(1.0, 1.0) == doctest::Approx(1.5));
    CHECK(epot_renorm(0.0, -1.0) == 0.0);
    CHECK(epot_renorm(-1.0, 0.0) == 0.0);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 1000; ++k) CHECK(epot_renorm(u(rng), u(rng)) >= 0.0);
}

TEST_CASE("energy of simple states") {
    const RadialGrid g(10.0, 200);
    const EnergyBreakdown zero = energy_radial(ProfilePair::zeros(g, 0.7));
    CHECK(zero.kinetic_diag == 0.0);
    CHECK(zero.kinetic_cross == 0.0);
    CHECK(zero.potential == doctest::Approx(100.0 / 4.0).epsilon(1e-13));

    const ClassicalProfile c = solve_classical(RadialGrid(20.0, 2000));
    const EnergyBreakdown e = energy_radial(embed_classical(c, 0.8));
    CHECK(e.kinetic_cross == 0.0);
    CHECK(e.kinetic_diag >= 0.0);
    CHECK(e.potential >= 0.0);
    CHECK(e.total == doctest::Approx(e.kinetic_diag + e.kinetic_cross + e.potential).epsilon(1e-15));

    ProfilePair p = smooth_pair(g, 0.5, 0);
    CHECK(kind_of([&] { energy_radial(p); }) == ErrorKind::unsupported_degree);
    CHECK(kind_of([&] { energy_gradient(p); }) == ErrorKind::unsupported_degree);
}

namespace {

// Cell midpoint values of the piecewise-linear interpolant, weight r_{i+1/2}.
double midpoint_energy(const ProfilePair& p) {
    const RadialGrid& g = p.grid;
    const double h = g.h();
    double total = 0.0;
    for (std::size_t i = 0; i < g.N(); ++i) {
        const double r = g.r(i) + 0.5 * h;
        const double m = 0.5 * (p.fm[i] + p.fm[i + 1]), q = 0.5 * (p.fp[i] + p.fp[i + 1]);
        const double dm = (p.fm[i + 1] - p.fm[i]) / h, dq = (p.fp[i + 1] - p.fp[i]) / h;
        const double kin = dm * dm + dq * dq + (m * m + q * q) / (r * r) + p.t * (dm + m / r) * (dq + q / r);
        const double s = m * m + q * q - 1.0;
        total += h * r * (kin + 0.5 * s * s + m * m * q * q);
    }
    return total;
}

} // namespace

TEST_CASE("energy agrees with an independent midpoint quadrature on the t = 1 solution") {
    std::vector<double> rel;
    for (std::size_t N : {5000, 10000}) {
        const RadialGrid g(100.0, N);
        const SolutionFamily fam = continue_in_t(g, ContinuationConfig{}, solve_classical(g));
        const ProfilePair& p = fam.members.back().profile;
        const double e = energy_radial(p).total;
        REQUIRE(std::isfinite(e));
        const double mid = midpoint_energy(p);
        rel.push_back((e - mid) / mid);
    }
    // The two rules differ by h^2/8 times the integrated curvature of the
    // density; at h = 0.01 that is 2e-6, so compare at second order.
    CHECK(std::abs(rel[1]) <= 1e-5);
    CHECK(rel[0] / rel[1] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(std::abs(rel[1] - (rel[0] - rel[1]) / 3.0) <= 1e-6);
}

TEST_CASE("residual of the constant state at large r") {
    const RadialGrid g(100.0, 1000);
    for (double t : {0.0, 0.3, 1.0}) {
        ProfilePair p = ProfilePair::zeros(g, t);
        for (std::size_t i = 1; i <= g.N(); ++i) p.fm[i] = 1.0;
        const auto res = residual(p);
        for (std::size_t i = 500; i < g.N(); i += 97) {
            const double r = g.r(i);
            CHECK(res[2 * (i - 1)] == doctest::Approx((1.0 - 0.25 * t * t) / (r * r)).epsilon(1e-10));
            CHECK(res[2 * (i - 1) + 1] == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("discrete residual of the tail model converges at second order to the closed form") {
    const double t = 0.6, r0 = 20.0, R = 40.0;
    const TailModel m = expansion_coefficients(t);
    std::vector<double> at;
    for (std::size_t N : {400, 800, 1600, 3200}) {
        const RadialGrid g(R, N);
        ProfilePair p = ProfilePair::zeros(g, t);
        for (std::size_t i = 1; i <= N; ++i) {
            p.fm[i] = m.w_minus(g.r(i));
            p.fp[i] = m.w_plus(g.r(i));
        }
        const std::size_t i0 = g.index_below(r0 + 1e-9);
        at.push_back(residual(p)[2 * (i0 - 1)]);
    }
    const double ratio1 = (at[0] - at[1]) / (at[1] - at[2]);
    const double ratio2 = (at[1] - at[2]) / (at[2] - at[3]);
    CHECK(ratio1 == doctest::Approx(4.0).epsilon(0.02));
    CHECK(ratio2 == doctest::Approx(4.0).epsilon(0.02));
    const double extrapolated = at[3] + (at[3] - at[2]) / 3.0;
    const double exact = m.residual(r0).first;
    CHECK(std::abs(extrapolated - exact) <= 1e-3 * std::abs(exact));
    CHECK(std::abs(exact) * std::pow(r0, 6) < 50.0);
}

TEST_CASE("jacobian matches finite differences") {
    const RadialGrid g(8.0, 64);
    for (int n : {-1, 0, 1, -3}) {
        for (SystemForm form : {SystemForm::diagonalized, SystemForm::raw}) {
            const ProfilePair p = smooth_pair(g, 0.7, n);
            const auto v = random_vector(2 * (g.N() - 1), 3 + static_cast<unsigned>(n + 5));
            const auto Jv = jacobian(p, form).apply(v);
            auto eval = [&](const ProfilePair& q) { return form == SystemForm::raw ? raw_residual(q) : residual(q); };
            const auto F0 = eval(p);
            const double eps = 1e-6;
            ProfilePair q = p;
            for (std::size_t i = 1; i < g.N(); ++i) {
                q.fm[i] += eps * v[2 * (i - 1)];
                q.fp[i] += eps * v[2 * (i - 1) + 1];
            }
            const auto F1 = eval(q);
            double err = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < F0.size(); ++k) {
                err = std::max(err, std::abs((F1[k] - F0[k]) / eps - Jv[k]));
                scale = std::max(scale, std::abs(Jv[k]));
            }
            CAPTURE(n);
            CHECK(err <= 1e-5 * scale);
        }
    }
}

TEST_CASE("jacobian coupling structure") {
    const RadialGrid g(10.0, 100);
    ProfilePair p = smooth_pair(g, 0.0);
    std::fill(p.fp.begin(), p.fp.end(), 0.0);
    const BlockTridiagonal J0 = jacobian(p, SystemForm::diagonalized);
    for (std::size_t b = 0; b < J0.blocks(); ++b) {
        CHECK(J0.diag(b)(0, 1) == 0.0);
        CHECK(J0.diag(b)(1, 0) == 0.0);
        if (b > 0) CHECK(J0.lower(b)(0, 1) == 0.0);
        if (b + 1 < J0.blocks()) CHECK(J0.upper(b)(1, 0) == 0.0);
    }

    // raw (Euler-Lagrange) form: the (-,+) and (+,-) entries coincide
    const ProfilePair q = smooth_pair(g, 0.9);
    const BlockTridiagonal J = jacobian(q, SystemForm::raw);
    for (std::size_t b = 0; b < J.blocks(); ++b) {
        CHECK(J.diag(b)(0, 1) == doctest::Approx(J.diag(b)(1, 0)).epsilon(1e-14));
        if (b > 0) CHECK(J.lower(b)(0, 1) == doctest::Approx(J.lower(b)(1, 0)).epsilon(1e-14));
        if (b + 1 < J.blocks()) CHECK(J.upper(b)(0, 1) == doctest::Approx(J.upper(b)(1, 0)).epsilon(1e-14));
    }
}

TEST_CASE("raw and diagonalized residuals are related by the 2x2 combination") {
    const RadialGrid g(12.0, 240);
    for (double t : {0.0, 0.4, 1.0}) {
        const ProfilePair p = smooth_pair(g, t);
        const auto raw = raw_residual(p);
        const auto diag = residual(p);
        for (std::size_t k = 0; k < raw.size(); k += 2) {
            const double a = raw[k] - 0.5 * t * raw[k + 1];
            const double b = raw[k + 1] - 0.5 * t * raw[k];
            CHECK(diag[k] == doctest::Approx(a).epsilon(1e-12).scale(1.0));
            CHECK(diag[k + 1] == doctest::Approx(b).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("residual is odd in the pair") {
    const RadialGrid g(6.0, 60);
    ProfilePair p = smooth_pair(g, 0.65);
    ProfilePair m = p;
    for (auto* v : {&m.fm, &m.fp})
        for (double& x : *v) x = -x;
    const auto a = residual(p), b = residual(m);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(b[k] == doctest::Approx(-a[k]).epsilon(1e-14).scale(1.0));
}

TEST_CASE("energy gradient is 2 r h times the raw residual") {
    for (std::size_t N : {200, 400, 800}) {
        const RadialGrid g(10.0, N);
        const ProfilePair p = smooth_pair(g, 0.8);
        const auto grad = energy_gradient(p);
        const auto raw = raw_residual(p);
        for (std::size_t i = 1; i < N; ++i) {
            const double w = 2.0 * g.r(i) * g.h();
            CHECK(grad[2 * i] / w == doctest::Approx(raw[2 * (i - 1)]).epsilon(1e-9).scale(1.0));
            CHECK(grad[2 * i + 1] / w == doctest::Approx(raw[2 * (i - 1) + 1]).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("energy gradient matches finite differences of the energy") {
    const RadialGrid g(5.0, 50);
    const ProfilePair p = smooth_pair(g, 0.45);
    const auto grad = energy_gradient(p);
    const double eps = 1e-6;
    for (std::size_t i : {1, 7, 25, 49}) {
        for (int c = 0; c < 2; ++c) {
            ProfilePair a = p, b = p;
            (c == 0 ? a.fm : a.fp)[i] += eps;
            (c == 0 ? b.fm : b.fp)[i] -= eps;
            const double fd = (energy_radial(a).total - energy_radial(b).total) / (2.0 * eps);
            CHECK(grad[2 * i + static_cast<std::size_t>(c)] == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
        }
    }
}

TEST_CASE("block Thomas solve agrees with a dense LU oracle") {
    const std::size_t n = 40;
    BlockTridiagonal A(n);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t b = 0; b < n; ++b)
        for (int k = 0; k < 4; ++k) {
            A.diag(b).a[static_cast<std::size_t>(k)] = u(rng) + (k == 0 || k == 3 ? 6.0 : 0.0);
            if (b > 0) A.lower(b).a[static_cast<std::size_t>(k)] = u(rng);
            if (b + 1 < n) A.upper(b).a[static_cast<std::size_t>(k)] = u(rng);
        }
    const auto rhs = random_vector(2 * n, 5);
    const auto x = A.solve(rhs);
    const auto D = A.dense();
    Eigen::MatrixXd M(2 * n, 2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i)
        for (std::size_t j = 0; j < 2 * n; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = D[i * 2 * n + j];
    const Eigen::VectorXd ref = M.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(2 * n)));
    for (std::size_t k = 0; k < 2 * n; ++k) CHECK(x[k] == doctest::Approx(ref[static_cast<Eigen::Index>(k)]).epsilon(1e-10));

    BlockTridiagonal S(3);
    CHECK(kind_of([&] { S.solve(std::vector<double>(6, 1.0)); }) == ErrorKind::numerical_breakdown);
}

TEST_CASE("scalar Thomas solve") {
    const std::size_t n = 30;
    const auto lo = random_vector(n, 1), hi = random_vector(n, 2), rhs = random_vector(n, 3);
    std::vector<double> mid(n, 4.0);
    const auto x = solve_tridiagonal(lo, mid, hi, rhs);
    for (std::size_t i = 0; i < n; ++i) {
        double row = mid[i] * x[i];
        if (i > 0) row += lo[i] * x[i - 1];
        if (i + 1 < n) row += hi[i] * x[i + 1];
        CHECK(row == doctest::Approx(rhs[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("profile invariants") {
    const RadialGrid g(10.0, 100);
    ProfilePair p = ProfilePair::zeros(g, 0.2);
    p.fm[0] = 0.1;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::invalid_argument);
    const ProfilePair short_pair(g, std::vector<double>(5), std::vector<double>(101), 0.1);
    CHECK(kind_of([&] { short_pair.validate(); }) == ErrorKind::invalid_argument);
    ProfilePair bad_t = ProfilePair::zeros(g, 1.5);
    CHECK(kind_of([&] { bad_t.validate(); }) == ErrorKind::invalid_argument);
}
