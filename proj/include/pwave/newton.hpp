#pragma once

#include "pwave/radial_core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace pwave {

struct NewtonOptions {
    double tol = 1e-10;
    int max_iters = 50;
    double shrink = 0.5;
    int max_backtracks = 30;
    double armijo = 1e-4;
};

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;
/// Returns the Newton correction dx solving J(x) dx = -F.
using StepFn = std::function<std::vector<double>(std::span<const double> x, std::span<const double> F)>;

/// Damped Newton with Armijo backtracking on the Euclidean residual norm.
/// Convergence is declared on the sup-norm. `x` is updated in place; the
/// report is returned whether or not the iteration converged. Throws
/// numerical_breakdown when an iterate or residual turns non-finite.
SolveReport damped_newton(std::vector<double>& x, const ResidualFn& residual, const StepFn& step,
                          const NewtonOptions& opt);

/// Thomas algorithm for a scalar tridiagonal system; lo[0] and hi[n-1] are ignored.
std::vector<double> solve_tridiagonal(std::span<const double> lo, std::span<const double> mid,
                                      std::span<const double> hi, std::span<const double> rhs);

} // namespace pwave
