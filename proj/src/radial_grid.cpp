#include "pwave/radial_grid.hpp"

#include "pwave/errors.hpp"

#include <cmath>
#include <string>

namespace pwave {

RadialGrid::RadialGrid(double R, std::size_t N) : R_(R), N_(N), h_(0.0) {
    require(std::isfinite(R) && R > 0.0, "grid radius must be positive, got R=" + std::to_string(R));
    require(N >= min_intervals,
            "grid needs at least " + std::to_string(min_intervals) + " intervals, got N=" + std::to_string(N));
    h_ = R / static_cast<double>(N);
    nodes_.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) nodes_[i] = static_cast<double>(i) * h_;
    nodes_[N] = R; // exact endpoint
}

std::size_t RadialGrid::index_below(double r) const noexcept {
    if (r <= 0.0) return 0;
    if (r >= R_) return N_;
    auto i = static_cast<std::size_t>(std::floor(r / h_));
    if (i > N_) i = N_;
    while (i > 0 && nodes_[i] > r) --i;
    while (i < N_ && nodes_[i + 1] <= r) ++i;
    return i;
}

} // namespace pwave
