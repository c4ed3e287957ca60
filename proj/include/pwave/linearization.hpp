#pragma once

#include "pwave/classical_gl.hpp"

#include <span>
#include <vector>

namespace pwave {

/// -Delta_r + 1/r^2 + V on the interior nodes with homogeneous Dirichlet ends.
///
/// Multiplying the centered stencil by r_i gives a symmetric tridiagonal
/// matrix K (stored here); the eigenproblem is K phi = lambda diag(r_i) phi.
struct WeightedOperator {
    RadialGrid grid;
    std::vector<double> V;     ///< potential at all N+1 nodes
    std::vector<double> diag;  ///< K_ii, interior nodes 1..N-1
    std::vector<double> off;   ///< K_{i,i+1}, size N-2
    std::vector<double> mass;  ///< r_i h

    /// (-Delta_r + 1/r^2 + V) phi at the interior nodes; phi has N+1 entries.
    std::vector<double> apply(std::span<const double> phi) const;
    /// sum r_i h u_i v_i over the interior nodes.
    double inner(std::span<const double> u, std::span<const double> v) const;
};

WeightedOperator assemble_operator(const RadialGrid& grid, std::vector<double> V);
/// V = 3 f^2 - 1
WeightedOperator l_minus(const ClassicalProfile& f);
/// V = 2 f^2 - 1
WeightedOperator l_plus(const ClassicalProfile& f);

/// Q_0 at the classical profile, cell-wise trapezoid in r. Both components
/// must vanish at r = 0 and r = R.
double q0_value(const ClassicalProfile& f, std::span<const double> phi_minus, std::span<const double> phi_plus);

struct EigenResult {
    double lambda = 0.0;
    std::vector<double> vector; ///< N+1 entries, unit r-weighted norm
    int iterations = 0;
};

/// Bottom of the discrete spectrum: Sturm bisection for the shift, then
/// shifted inverse iteration to relative `tol`.
EigenResult smallest_eigenpair(const WeightedOperator& op, double tol = 1e-10, int max_iters = 200);
double smallest_eigenvalue(const WeightedOperator& op, double tol = 1e-10, int max_iters = 200);

/// Far-field Dirichlet value of h at R: -1/(2R^2) - 13/(4R^4).
double h_outer_value(double R);

struct HSolution {
    RadialGrid grid;
    std::vector<double> h;
    SolveReport report;
    double h_prime_0 = 0.0;  ///< one-sided second-order difference
    double h_min = 0.0;
    bool negative_interior = false;
    double g2_estimate = 0.0; ///< fitted (g(r) - g(0)) / r^2 on r <= 0.2, g = h/f
};

/// Single tridiagonal solve of L_+ h = -f (1 - f^2) / 2.
HSolution solve_h(const ClassicalProfile& f);

/// ||phi||_inf^2 - int (phi'^2 + phi^2/r^2) r dr; requires phi(0) = 0.
double embedding_check(const RadialGrid& grid, std::span<const double> phi);

} // namespace pwave
