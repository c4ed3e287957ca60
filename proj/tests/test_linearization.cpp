#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pwave/classical_gl.hpp"
#include "pwave/errors.hpp"
#include "pwave/linearization.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace pwave;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected pwave::Error");
    return ErrorKind::invalid_argument;
}

std::vector<double> random_dirichlet(const RadialGrid& g, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> c(6);
    for (double& x : c) x = n(rng);
    std::vector<double> phi(g.size(), 0.0);
    for (std::size_t i = 1; i < g.N(); ++i)
        for (std::size_t k = 0; k < c.size(); ++k)
            phi[i] += c[k] * std::sin(static_cast<double>(k + 1) * std::numbers::pi * g.r(i) / g.R());
    return phi;
}

// Bottom eigenvalue of K phi = lambda diag(r_i) phi via the symmetric
// tridiagonal D^{-1/2} K D^{-1/2} and Eigen's tridiagonal QL solver.
double dense_oracle(const WeightedOperator& op) {
    const auto n = static_cast<Eigen::Index>(op.diag.size());
    Eigen::VectorXd d(n), e(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = op.diag[static_cast<std::size_t>(i)] / op.grid.r(static_cast<std::size_t>(i) + 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        e[i] = op.off[static_cast<std::size_t>(i)] /
               std::sqrt(op.grid.r(static_cast<std::size_t>(i) + 1) * op.grid.r(static_cast<std::size_t>(i) + 2));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// r-weighted inner product of two full-length nodal vectors
double dot(const WeightedOperator& op, const std::vector<double>& u, const std::vector<double>& v) {
    const std::size_t n = op.diag.size();
    return op.inner(std::span(u).subspan(1, n), std::span(v).subspan(1, n));
}

} // namespace

TEST_CASE("Q0 elementary values") {
    const ClassicalProfile f = solve_classical(RadialGrid(20.0, 1000));
    const std::vector<double> zero(f.grid.size(), 0.0);
    CHECK(q0_value(f, zero, zero) == 0.0);

    std::mt19937 rng(3);
    const auto phi = random_dirichlet(f.grid, rng);
    double weighted = 0.0;
    for (std::size_t i = 1; i < f.grid.N(); ++i) weighted += f.grid.h() * f.grid.r(i) * f.f[i] * f.f[i] * phi[i] * phi[i];
    const double diff = q0_value(f, phi, zero) - q0_value(f, zero, phi);
    CHECK(diff >= 0.0);
    CHECK(diff == doctest::Approx(weighted).epsilon(1e-12));

    std::vector<double> bad = phi;
    bad.back() = 0.1;
    CHECK(kind_of([&] { q0_value(f, bad, zero); }) == ErrorKind::invalid_argument);
    bad = phi;
    bad.front() = 0.1;
    CHECK(kind_of([&] { q0_value(f, zero, bad); }) == ErrorKind::invalid_argument);
}

TEST_CASE("operator symmetry and the quadratic form") {
    const ClassicalProfile f = solve_classical(RadialGrid(30.0, 1500));
    const WeightedOperator lm = l_minus(f), lp = l_plus(f);
    std::mt19937 rng(17);
    for (int k = 0; k < 10; ++k) {
        const auto u = random_dirichlet(f.grid, rng), v = random_dirichlet(f.grid, rng);
        const std::size_t n = lp.diag.size();
        const auto Lu = lp.apply(u), Lv = lp.apply(v), Lmu = lm.apply(u);
        const auto ui = std::span(u).subspan(1, n), vi = std::span(v).subspan(1, n);
        CHECK(lp.inner(Lu, vi) == doctest::Approx(lp.inner(ui, Lv)).epsilon(1e-12));

        const double form = lm.inner(Lmu, ui) + lp.inner(Lv, vi);
        CHECK(q0_value(f, u, v) == doctest::Approx(form).epsilon(1e-10));
    }
    for (std::size_t i = 0; i + 1 < lp.off.size(); ++i) CHECK(lp.off[i] < 0.0);
}

TEST_CASE("smallest eigenvalues and the Rayleigh bound") {
    const ClassicalProfile f = solve_classical(RadialGrid(60.0, 6000));
    const WeightedOperator lm = l_minus(f), lp = l_plus(f);
    const EigenResult em = smallest_eigenpair(lm), ep = smallest_eigenpair(lp);
    CHECK(ep.lambda > 0.0);
    CHECK(em.lambda > ep.lambda);
    CHECK(dot(lp, ep.vector, ep.vector) == doctest::Approx(1.0).epsilon(1e-10));
    MESSAGE("lambda_min(L-) = " << em.lambda << ", lambda_min(L+) = " << ep.lambda);

    const double lam = std::min(em.lambda, ep.lambda);
    std::mt19937 rng(99);
    for (int k = 0; k < 50; ++k) {
        auto a = random_dirichlet(f.grid, rng), b = random_dirichlet(f.grid, rng);
        const double norm = std::sqrt(dot(lp, a, a) + dot(lp, b, b));
        for (double& x : a) x /= norm;
        for (double& x : b) x /= norm;
        REQUIRE(q0_value(f, a, b) >= lam - 1e-10);
    }
    CHECK(q0_value(f, em.vector, std::vector<double>(f.grid.size(), 0.0)) == doctest::Approx(em.lambda).epsilon(1e-9));
}

TEST_CASE("eigenvalues agree with a tridiagonal QL oracle") {
    for (double R : {20.0, 60.0}) {
        const ClassicalProfile f = solve_classical(RadialGrid(R, 2000));
        for (const WeightedOperator& op : {l_minus(f), l_plus(f)}) {
            CAPTURE(R);
            CHECK(smallest_eigenvalue(op) == doctest::Approx(dense_oracle(op)).epsilon(1e-8));
        }
    }
}

TEST_CASE("domain monotonicity and positivity up to R = 200") {
    double prev_m = INFINITY, prev_p = INFINITY;
    for (double R : {25.0, 50.0, 100.0, 200.0}) {
        const ClassicalProfile f = solve_classical(RadialGrid(R, static_cast<std::size_t>(40 * R)));
        const double m = smallest_eigenvalue(l_minus(f)), p = smallest_eigenvalue(l_plus(f));
        CAPTURE(R);
        CHECK(m > 0.0);
        CHECK(p > 0.0);
        CHECK(m <= prev_m + 1e-8);
        CHECK(p <= prev_p + 1e-8);
        prev_m = m;
        prev_p = p;
    }
}

TEST_CASE("first variation h") {
    const ClassicalProfile f = solve_classical(RadialGrid(60.0, 6000));
    const HSolution h = solve_h(f);
    CHECK(h.h.front() == 0.0);
    CHECK(h.h.back() == doctest::Approx(h_outer_value(60.0)).epsilon(1e-15));
    CHECK(h.negative_interior);
    for (std::size_t i = 1; i + 1 < h.h.size(); ++i) REQUIRE(h.h[i] < 0.0);
    CHECK(h.h_prime_0 < 0.0);
    CHECK(h.h_min < 0.0);

    const auto Lh = l_plus(f).apply(h.h);
    double res = 0.0;
    for (std::size_t i = 1; i < f.grid.N(); ++i)
        res = std::max(res, std::abs(Lh[i - 1] + 0.5 * f.f[i] * (1.0 - f.f[i] * f.f[i])));
    CHECK(res <= 1e-10);

    CHECK(h.g2_estimate == doctest::Approx(1.0 / 16.0).epsilon(0.03));

    // least squares of h on {r^-2, r^-4} over [30, 54]
    double s22 = 0, s24 = 0, s44 = 0, y2 = 0, y4 = 0;
    for (std::size_t i = 0; i < h.h.size(); ++i) {
        const double r = f.grid.r(i);
        if (r < 30.0 || r > 54.0) continue;
        const double p2 = 1.0 / (r * r), p4 = p2 * p2;
        s22 += p2 * p2;
        s24 += p2 * p4;
        s44 += p4 * p4;
        y2 += p2 * h.h[i];
        y4 += p4 * h.h[i];
    }
    const double a = (y2 * s44 - y4 * s24) / (s22 * s44 - s24 * s24);
    CHECK(a == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("embedding inequality") {
    const RadialGrid g(10.0, 1000);
    CHECK(embedding_check(g, std::vector<double>(g.size(), 0.0)) == 0.0);

    std::vector<double> tent(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) tent[i] = std::min({g.r(i), 1.0, g.R() - g.r(i)});
    CHECK(embedding_check(g, tent) < 0.0);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double a = u(rng), b = u(rng), c = 2.0 + 3.0 * std::abs(u(rng));
        std::vector<double> phi(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = g.r(i);
            phi[i] = r * std::exp(-r / c) * (1.0 + a * std::sin(r) + b * std::cos(2.0 * r) - b);
        }
        REQUIRE(embedding_check(g, phi) <= 1e-6);
    }

    std::vector<double> bad(g.size(), 1.0);
    CHECK(kind_of([&] { embedding_check(g, bad); }) == ErrorKind::invalid_argument);
}
