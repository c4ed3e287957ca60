#pragma once

#include "pwave/profile.hpp"

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace pwave {

/// Truncated inverse-power far-field model
///   w_-(r) = 1 + a_-/r^2 + b_-/r^4 + c_- R^6/r^6
///   w_+(r) = t (a_+/r^2 + b_+/r^4 + c_+ R^6/r^6)
/// where R = R_ref. The c-terms only appear in barrier constructions.
struct TailModel {
    double t = 0.0;
    double a_minus = 0.0, a_plus = 0.0;
    double b_minus = 0.0, b_plus = 0.0;
    double c_minus = 0.0, c_plus = 0.0;
    double R_ref = 1.0;

    double tau() const { return 1.0 - 0.25 * t * t; }
    double w_minus(double r) const;
    double w_plus(double r) const;
    double dw_minus(double r) const;
    double dw_plus(double r) const;

    /// Barrier residuals (E_-, E_+) of the diagonalized system evaluated
    /// in closed form: tau(-Delta_r w + w/r^2) plus the nonlinear terms.
    std::pair<double, double> residual(double r) const;
};

/// Solves the r^-2 and r^-4 coefficient systems that make the leading
/// orders of the barrier residual vanish.
TailModel expansion_coefficients(double t);

/// Left-hand sides of the four coefficient equations (M2-, M2+, M4-, M4+)
/// evaluated at the model's a and b; all zero for `expansion_coefficients(t)`.
std::array<double, 4> coefficient_equations(const TailModel& m);

struct TailFit {
    double r_lo = 0.0, r_hi = 0.0;
    std::size_t nodes = 0;
    double a_minus = 0.0, b_minus = 0.0;
    double a_plus = 0.0, b_plus = 0.0;
    bool has_plus = false;
    double residual_minus = 0.0; ///< RMS of the least-squares misfit
    double residual_plus = 0.0;
};

/// Least squares of f_- - 1 and f_+/t on {r^-2, r^-4} over nodes in
/// [r_lo, r_hi]. The f_+ fit is skipped when t = 0 unless `require_plus`.
TailFit fit_tail(const ProfilePair& p, double r_lo, double r_hi, bool require_plus = false);

enum class BarrierKind { super, sub };

struct BarrierCheck {
    double t = 0.0, delta = 0.0, R = 0.0;
    BarrierKind kind = BarrierKind::super;
    std::vector<double> r, E_minus, E_plus;
    bool verdict = false; ///< E_+- > 0 everywhere (super) or < 0 everywhere (sub)
};

/// Tail model for barrier pairs: c_- = +-delta, c_+ = +-2 delta, R_ref = R.
TailModel barrier_model(double t, double delta, double R, BarrierKind kind);

/// Samples E_+- of the barrier pair on [R, 10R] (log-spaced) and returns the
/// sign verdict. Requires 0 < delta < 1/32 and R > 0.
BarrierCheck supersolution_residual(double t, double delta, double R, BarrierKind kind = BarrierKind::super,
                                    std::size_t samples = 400);

/// Smallest R in [R_lo, R_hi] (to relative `rtol`) at which the barrier
/// verdict holds, by bisection. Throws invalid_argument when it fails at R_hi.
double find_validity_radius(double t, double delta, BarrierKind kind, double R_lo, double R_hi,
                            double rtol = 1e-3);

struct PohozaevReport {
    std::vector<double> r;        ///< nodes where the mismatch is evaluated
    std::vector<double> mismatch; ///< P'(r) - r^2 d/dr e_pot
    double sup_mismatch = 0.0;
    double potential_integral = 0.0;     ///< 2 * int e_pot r dr (renormalized)
    double boundary_exact = 0.0;         ///< R^2 e(R) - R^2 K(R) + S(R); K = f_-'^2 + f_+'^2 + f_-' f_+', S = f_-^2 + f_+^2 + f_- f_+
    double boundary_derivative_form = 0.0; ///< 1 - R^2 (f_-'^2 + f_+'^2 + f_-' f_+')(R)
    double boundary_literal_form = 0.0;    ///< 1 - R^2 (f_-'^2 + f_+'^2 + f_-(R) f_+(R))
};

/// Discrete check of the Pohozaev identity
///   [r^2 (f_-'^2 + f_+'^2 + f_+' f_-') - f_-^2 - f_+^2 - f_- f_+]' = r^2 e_pot'
/// for the t = 1 system.
PohozaevReport pohozaev_residual(const ProfilePair& p);

struct DerivativeTailReport {
    double r_lo = 0.0, r_hi = 0.0;
    double lead_minus = 0.0, corr_minus = 0.0; ///< r^3 f_-' ~ lead + corr / r^2
    double lead_plus = 0.0, corr_plus = 0.0;   ///< r^3 f_+' / t ~ lead + corr / r^2
    bool has_plus = false;
    double bound_minus = 0.0; ///< max r^5 |f_-' - 1/r^3| on the window
    double bound_plus = 0.0;  ///< max r^5 |f_+' - t/r^3| / t
    bool monotone_minus = false; ///< r^3 f_-' approaches 1 monotonically
};

/// Far-field derivative check on [R/2, 0.9R] with centered nodal derivatives.
DerivativeTailReport derivative_tail_check(const ProfilePair& p);

} // namespace pwave
