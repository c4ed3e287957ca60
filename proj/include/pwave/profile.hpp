#pragma once

#include "pwave/radial_grid.hpp"

#include <vector>

namespace pwave {

/// Discrete radial profiles (f_-, f_+) of the equivariant ansatz
/// eta_- = f_-(r) e^{i n theta}, eta_+ = f_+(r) e^{i (n+2) theta}.
struct ProfilePair {
    RadialGrid grid;
    std::vector<double> fm;
    std::vector<double> fp;
    double t = 0.0;
    int degree = -1;

    ProfilePair(RadialGrid g, std::vector<double> minus, std::vector<double> plus,
                double coupling, int n = -1);

    /// Zero profiles on `g`.
    static ProfilePair zeros(const RadialGrid& g, double coupling, int n = -1);

    /// Throws invalid_argument unless lengths match the grid, f(0) = 0 and t in [0,1].
    void validate() const;
};

/// Copy of `p` with a new coupling value.
ProfilePair with_coupling(ProfilePair p, double t);

} // namespace pwave
