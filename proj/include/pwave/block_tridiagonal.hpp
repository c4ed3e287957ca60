#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace pwave {

/// Row-major 2x2 block.
struct Block2 {
    std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};

    double& operator()(int i, int j) { return a[2 * i + j]; }
    double operator()(int i, int j) const { return a[2 * i + j]; }
    double det() const { return a[0] * a[3] - a[1] * a[2]; }
};

/// Square block-tridiagonal matrix with 2x2 blocks. Row i couples unknowns
/// i-1, i, i+1; unknowns are stored interleaved (x_{i,0}, x_{i,1}).
class BlockTridiagonal {
public:
    explicit BlockTridiagonal(std::size_t blocks);

    std::size_t blocks() const noexcept { return diag_.size(); }

    Block2& lower(std::size_t i) { return lower_[i]; }
    Block2& diag(std::size_t i) { return diag_[i]; }
    Block2& upper(std::size_t i) { return upper_[i]; }
    const Block2& lower(std::size_t i) const { return lower_[i]; }
    const Block2& diag(std::size_t i) const { return diag_[i]; }
    const Block2& upper(std::size_t i) const { return upper_[i]; }

    std::vector<double> apply(std::span<const double> x) const;

    /// Block Thomas elimination. Throws numerical_breakdown on a singular
    /// pivot block or a non-finite result.
    std::vector<double> solve(std::span<const double> rhs) const;

    /// Dense row-major copy, for tests and small problems.
    std::vector<double> dense() const;

private:
    std::vector<Block2> lower_; // lower_[0] unused
    std::vector<Block2> diag_;
    std::vector<Block2> upper_; // upper_[n-1] unused
};

} // namespace pwave
