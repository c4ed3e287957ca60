#include "pwave/profile.hpp"

#include "pwave/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace pwave {

ProfilePair::ProfilePair(RadialGrid g, std::vector<double> minus, std::vector<double> plus,
                         double coupling, int n)
    : grid(std::move(g)), fm(std::move(minus)), fp(std::move(plus)), t(coupling), degree(n) {}

ProfilePair ProfilePair::zeros(const RadialGrid& g, double coupling, int n) {
    return ProfilePair(g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0), coupling, n);
}

void ProfilePair::validate() const {
    require(fm.size() == grid.size() && fp.size() == grid.size(),
            "profile length must equal N+1 = " + std::to_string(grid.size()));
    require(fm.front() == 0.0 && fp.front() == 0.0, "profiles must vanish at r = 0");
    require(std::isfinite(t) && t >= 0.0 && t <= 1.0, "coupling t must lie in [0,1]");
}

ProfilePair with_coupling(ProfilePair p, double t) {
    p.t = t;
    return p;
}

} // namespace pwave
