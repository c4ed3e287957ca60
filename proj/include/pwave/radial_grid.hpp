#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pwave {

/// Uniform mesh r_i = i*h, i = 0..N, on [0, R].
class RadialGrid {
public:
    static constexpr std::size_t min_intervals = 16;

    RadialGrid(double R, std::size_t N);

    double R() const noexcept { return R_; }
    std::size_t N() const noexcept { return N_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return N_ + 1; }

    double r(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    /// Index of the last node with r_i <= r.
    std::size_t index_below(double r) const noexcept;

    bool operator==(const RadialGrid& other) const noexcept {
        return N_ == other.N_ && R_ == other.R_;
    }

private:
    double R_;
    std::size_t N_;
    double h_;
    std::vector<double> nodes_;
};

inline RadialGrid build_grid(double R, std::size_t N) { return RadialGrid(R, N); }

} // namespace pwave
