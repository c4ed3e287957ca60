#pragma once

#include "pwave/block_tridiagonal.hpp"
#include "pwave/profile.hpp"

#include <map>
#include <string>
#include <vector>

namespace pwave {

/// Parts of the radial energy I_t on [0, R]. `potential` integrates the
/// renormalized density e_pot - 1/2.
struct EnergyBreakdown {
    double kinetic_diag = 0.0;
    double kinetic_cross = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> history;
    int damping_events = 0;
    bool exploratory = false;
    std::map<std::string, double> diagnostics;
};

enum class SystemForm {
    diagonalized, ///< tau (-Delta_r + 1/r^2) f + nonlinear terms, rows decoupled at top order
    raw,          ///< Euler-Lagrange form, second-order terms coupled through t/2
};

/// Renormalized potential (nu = 0): 1/2 (f_+^2 + f_-^2 - 1)^2 + f_+^2 f_-^2.
double epot_renorm(double fm, double fp);

/// Trapezoidal r-weighted quadrature of the radial energy densities on the
/// piecewise-linear interpolant of `p`. Degree must be -1.
EnergyBreakdown energy_radial(const ProfilePair& p);

/// Exact gradient of `energy_radial(p).total` with respect to every nodal
/// value, returned interleaved (m_0, p_0, m_1, p_1, ...). Degree must be -1.
std::vector<double> energy_gradient(const ProfilePair& p);

/// Discrete residual at interior nodes 1..N-1, interleaved (minus, plus).
/// Degree -1 uses the diagonalized system directly; other degrees apply the
/// diagonalizing row combination to the raw residual.
std::vector<double> residual(const ProfilePair& p);

/// Residual of the raw Euler-Lagrange form, sign chosen so that the
/// diagonalized residual equals [[1,-t/2],[-t/2,1]] applied per node.
std::vector<double> raw_residual(const ProfilePair& p);

/// Derivative of `residual` (or `raw_residual`) with respect to interior values.
BlockTridiagonal jacobian(const ProfilePair& p, SystemForm form = SystemForm::diagonalized);

double sup_norm(std::span<const double> v);

} // namespace pwave
