#pragma once

#include "pwave/profile.hpp"
#include "pwave/radial_core.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace pwave {

using cplx = std::complex<double>;

/// Polar mesh on the disk of radius R: a single center node plus N_r rings
/// r_i = i R / N_r (i = 1..N_r, ring N_r is the rim) of N_theta nodes each.
class DiskGrid {
public:
    DiskGrid(double R, std::size_t n_r, std::size_t n_theta);

    double R() const noexcept { return R_; }
    std::size_t n_r() const noexcept { return n_r_; }
    std::size_t n_theta() const noexcept { return n_theta_; }
    double dr() const noexcept { return R_ / static_cast<double>(n_r_); }
    double dtheta() const noexcept { return dtheta_; }
    double r(std::size_t i) const noexcept { return static_cast<double>(i) * dr(); }
    double theta(std::size_t j) const noexcept { return static_cast<double>(j) * dtheta_; }

    std::size_t num_nodes() const noexcept { return 1 + n_r_ * n_theta_; }
    /// Node index of (ring i, angle j); ring 0 is the center for every j.
    std::size_t node(std::size_t i, std::size_t j) const noexcept {
        return i == 0 ? 0 : 1 + (i - 1) * n_theta_ + (j % n_theta_);
    }
    std::size_t ring_of(std::size_t node) const noexcept { return node == 0 ? 0 : 1 + (node - 1) / n_theta_; }
    std::size_t angle_of(std::size_t node) const noexcept { return node == 0 ? 0 : (node - 1) % n_theta_; }
    bool is_rim(std::size_t node) const noexcept { return ring_of(node) == n_r_; }

    bool operator==(const DiskGrid&) const = default;

private:
    double R_;
    std::size_t n_r_, n_theta_;
    double dtheta_;
};

/// Two complex fields on the disk; the rim values are the Dirichlet data.
struct PlanarField {
    DiskGrid grid;
    std::vector<cplx> eta_minus;
    std::vector<cplx> eta_plus;

    static PlanarField zeros(const DiskGrid& g);
    std::vector<cplx> rim_minus() const;
    std::vector<cplx> rim_plus() const;
};

/// Samples eta_-(x, y), eta_+(x, y) at every node.
PlanarField sample_field(const DiskGrid& g, const std::function<cplx(double, double)>& minus,
                         const std::function<cplx(double, double)>& plus);

/// eta_- = f_-(r) e^{-i theta}, eta_+ = f_+(r) e^{i theta}, f linearly interpolated from the radial grid.
PlanarField embed_radial(const DiskGrid& g, const ProfilePair& p);

/// Cartesian derivatives of both components at one point.
struct PointGradient {
    cplx dx_minus, dy_minus, dx_plus, dy_plus;
};

enum class KineticForm { raw, squares };

/// |grad eta_+|^2 + |grad eta_-|^2 + (Pi_- eta_+).(Pi_+ eta_-) + nu (Pi_+ eta_+).(Pi_- eta_-)
double ekin_raw(const PointGradient& d, double nu);
/// Sum-of-squares rewriting of the same density.
double ekin_squares(const PointGradient& d, double nu);
/// e_pot - 1/2 (without the kappa^2 factor).
double epot_planar(cplx eta_minus, cplx eta_plus, double nu);

/// Nodal kinetic density: centered differences in (r, theta) converted to
/// (x, y); one-sided radial difference on the rim, ring-1 Fourier mode at the center.
std::vector<double> kinetic_density(const PlanarField& f, double nu, KineticForm form);
/// kappa^2 (e_pot - 1/2) per node.
std::vector<double> potential_density(const PlanarField& f, double nu, double kappa);

struct PlanarEnergy {
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

/// Discrete energy with quadrature at the radial-edge midpoints (r_{i+1/2}, theta_j).
PlanarEnergy planar_energy(const PlanarField& f, double nu, double kappa);

/// Gradient of `planar_energy` with respect to (Re eta_-, Im eta_-, Re eta_+, Im eta_+)
/// at every node (4 entries per node, rim included).
std::vector<double> planar_energy_gradient(const PlanarField& f, double nu, double kappa);

struct KernelCheck {
    bool kernel_form = false; ///< data of the form (c_+ + alpha z, c_- - alpha conj(z)) with alpha != 0
    cplx alpha{0.0, 0.0};
    double defect = 0.0; ///< rim misfit of the best kernel-form fit, relative to max |g|
};

/// Fourier test of the rim data against the kernel family of the kinetic form.
KernelCheck kernel_check(const std::vector<cplx>& g_minus, const std::vector<cplx>& g_plus, double R,
                         double rtol = 1e-10);

struct PlanarConfig {
    double tol = 1e-6; ///< sup-norm of the mass-scaled discrete gradient
    int max_iters = 20000;
    int max_backtracks = 60;

    void validate() const;
};

struct FourierDiagnostics {
    int max_mode = 0;
    std::vector<double> mass_minus; ///< r-weighted L^2 mass of modes -max_mode..max_mode
    std::vector<double> mass_plus;
    double equivariant_fraction = 0.0; ///< share of eta_- in mode -1 and eta_+ in mode +1
};

FourierDiagnostics fourier_modes(const PlanarField& f, int max_mode = 4);

struct PlanarResult {
    PlanarField field;
    SolveReport report;
    std::vector<double> energy_trace;
    FourierDiagnostics fourier;
};

/// Preconditioned Barzilai-Borwein descent on the discrete energy with the
/// rim held at (g_-, g_+). `init` (optional) supplies interior values;
/// otherwise the rim data is extended harmonically mode by mode.
PlanarResult minimize_planar(const DiskGrid& g, const std::vector<cplx>& g_minus, const std::vector<cplx>& g_plus,
                             double nu, double kappa, const PlanarConfig& cfg, const PlanarField* init = nullptr);

/// min over rim-zero fields of int e_kin / ||eta||_{H^1}^2 by inverse iteration.
double coercivity_estimate(const DiskGrid& g, double nu, double tol = 1e-9, int max_iters = 2000);

/// Sparse stiffness (kinetic form) and H^1 Gram matrices on the interior
/// DOFs, dense, for small meshes; exposed for eigen-solver cross-checks.
struct DenseCoercivityPair {
    std::vector<double> K, M; ///< row-major n x n
    std::size_t n = 0;
};
DenseCoercivityPair coercivity_matrices(const DiskGrid& g, double nu);

/// ||a - b||_{L^2} / ||b||_{L^2} with lumped nodal areas, both components.
double relative_l2_difference(const PlanarField& a, const PlanarField& b);

} // namespace pwave
