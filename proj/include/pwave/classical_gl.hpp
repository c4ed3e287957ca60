#pragma once

#include "pwave/radial_core.hpp"

#include <vector>

namespace pwave {

/// Degree-one Ginzburg-Landau radial profile on a finite grid.
struct ClassicalProfile {
    RadialGrid grid;
    std::vector<double> f;
    SolveReport report;
};

/// Truncated far-field value 1 - 1/(2R^2) - 9/(8R^4) used as outer Dirichlet data.
double classical_outer_value(double R);

/// Residual -(Delta_r f - f/r^2) + f (f^2 - 1) at interior nodes.
std::vector<double> classical_residual(const RadialGrid& grid, std::span<const double> f);

/// Newton solve from the seed r / sqrt(r^2 + 2). Throws SolverFailure when
/// the residual does not reach `tol` within `max_iters` iterations.
ClassicalProfile solve_classical(const RadialGrid& grid, double tol = 1e-10, int max_iters = 50);

/// Embeds the classical profile as (f, 0) at coupling t.
ProfilePair embed_classical(const ClassicalProfile& c, double t = 0.0);

} // namespace pwave
