#pragma once

#include "pwave/classical_gl.hpp"
#include "pwave/radial_core.hpp"
#include "pwave/solver_errors.hpp"

#include <utility>
#include <vector>

namespace pwave {

/// Outer Dirichlet data for the coupled radial system.
enum class OuterBC {
    asymptotic, ///< truncated far-field expansion at R
    sharp,      ///< (f_-, f_+)(R) = (1, 0)
};

struct ContinuationConfig {
    double t_start = 0.0;
    double t_end = 1.0;
    double dt_init = 0.05;
    double dt_min = 1e-4;
    double newton_tol = 1e-10;
    int max_newton_iters = 40;
    double armijo_shrink = 0.5;
    int armijo_max_backtracks = 30;
    OuterBC bc = OuterBC::asymptotic;

    void validate() const;
};

struct FamilyMember {
    double t;
    ProfilePair profile;
    SolveReport report;
};

/// Solutions ordered by strictly increasing t.
struct SolutionFamily {
    std::vector<FamilyMember> members;
};

/// Raised when the continuation step underflows `dt_min`; keeps what was computed.
class ContinuationStalled : public Error {
public:
    ContinuationStalled(const std::string& what, SolutionFamily partial)
        : Error(ErrorKind::continuation_stalled, what), partial_(std::move(partial)) {}
    const SolutionFamily& partial() const noexcept { return partial_; }

private:
    SolutionFamily partial_;
};

/// Outer boundary values (f_-(R), f_+(R)) at coupling t.
std::pair<double, double> outer_values(double R, double t, OuterBC bc);

/// Damped Newton on the diagonalized system at coupling t. The outer
/// boundary values of `init` are overwritten by the configured data.
std::pair<ProfilePair, SolveReport> solve_pwave(const RadialGrid& grid, double t, const ProfilePair& init,
                                                const ContinuationConfig& cfg);

/// Predictor-corrector march in t from the classical base point, halving
/// the step on Newton failure. Throws ContinuationStalled below dt_min.
SolutionFamily continue_in_t(const RadialGrid& grid, const ContinuationConfig& cfg, const ClassicalProfile& base);

/// Interpolates `sol` onto [0, R_new] (tail model beyond the old radius)
/// and re-solves. The report carries the sup-change over the old domain
/// ("sup_change_old_domain") and over its inner half ("sup_change_inner_half").
std::pair<ProfilePair, SolveReport> extend_domain(const ProfilePair& sol, double R_new, std::size_t N_new,
                                                  const ContinuationConfig& cfg);

struct GradientFlowConfig {
    int steps = 1000;
    double dt = 1e-4;
    double dt_min = 0.0; ///< steps are halved on energy increase down to this value; 0 disables halving
};

struct GradientFlowResult {
    ProfilePair profile;
    std::vector<double> energy; ///< energy after each accepted step (index 0 = initial)
    double initial_residual = 0.0;
    double final_residual = 0.0;
    double final_dt = 0.0;
};

/// Explicit descent f <- f - dt * M^{-1} grad I_t with the trapezoid mass
/// M = diag(2 r_i h); boundary values stay fixed. Throws step-size-failure
/// when the energy increases at the smallest admissible step.
GradientFlowResult gradient_flow(const ProfilePair& init, const GradientFlowConfig& cfg);

/// Exploratory solve of the degree-(n, n+2) system with (f_-, f_+)(R) = (1, 0),
/// reached by continuation from the decoupled t = 0 problem up to t = 1.
std::pair<ProfilePair, SolveReport> solve_general_degree(const RadialGrid& grid, int n, const ContinuationConfig& cfg);

} // namespace pwave
