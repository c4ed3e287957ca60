#include "pwave/block_tridiagonal.hpp"

#include "pwave/errors.hpp"

#include <cmath>

namespace pwave {

namespace {

Block2 mul(const Block2& x, const Block2& y) {
    Block2 z;
    z(0, 0) = x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0);
    z(0, 1) = x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1);
    z(1, 0) = x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0);
    z(1, 1) = x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1);
    return z;
}

Block2 inverse(const Block2& x) {
    const double d = x.det();
    const double scale = std::abs(x(0, 0)) + std::abs(x(0, 1)) + std::abs(x(1, 0)) + std::abs(x(1, 1));
    if (!(std::abs(d) > 1e-300) || std::abs(d) <= 1e-14 * scale * scale)
        fail(ErrorKind::numerical_breakdown, "singular pivot block in block-tridiagonal solve");
    Block2 inv;
    inv(0, 0) = x(1, 1) / d;
    inv(0, 1) = -x(0, 1) / d;
    inv(1, 0) = -x(1, 0) / d;
    inv(1, 1) = x(0, 0) / d;
    return inv;
}

} // namespace

BlockTridiagonal::BlockTridiagonal(std::size_t blocks) : lower_(blocks), diag_(blocks), upper_(blocks) {
    require(blocks > 0, "block-tridiagonal matrix needs at least one block");
}

std::vector<double> BlockTridiagonal::apply(std::span<const double> x) const {
    const std::size_t n = blocks();
    require(x.size() == 2 * n, "vector length does not match block-tridiagonal size");
    std::vector<double> y(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < 2; ++a) {
            double s = diag_[i](a, 0) * x[2 * i] + diag_[i](a, 1) * x[2 * i + 1];
            if (i > 0) s += lower_[i](a, 0) * x[2 * i - 2] + lower_[i](a, 1) * x[2 * i - 1];
            if (i + 1 < n) s += upper_[i](a, 0) * x[2 * i + 2] + upper_[i](a, 1) * x[2 * i + 3];
            y[2 * i + a] = s;
        }
    }
    return y;
}

std::vector<double> BlockTridiagonal::solve(std::span<const double> rhs) const {
    const std::size_t n = blocks();
    require(rhs.size() == 2 * n, "rhs length does not match block-tridiagonal size");
    std::vector<Block2> pivot_inv(n);
    std::vector<double> b(rhs.begin(), rhs.end());

    Block2 pivot = diag_[0];
    pivot_inv[0] = inverse(pivot);
    for (std::size_t i = 1; i < n; ++i) {
        const Block2 m = mul(lower_[i], pivot_inv[i - 1]);
        const Block2 mu = mul(m, upper_[i - 1]);
        for (int k = 0; k < 4; ++k) pivot.a[k] = diag_[i].a[k] - mu.a[k];
        b[2 * i] -= m(0, 0) * b[2 * i - 2] + m(0, 1) * b[2 * i - 1];
        b[2 * i + 1] -= m(1, 0) * b[2 * i - 2] + m(1, 1) * b[2 * i - 1];
        pivot_inv[i] = inverse(pivot);
    }

    std::vector<double> x(2 * n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double r0 = b[2 * k], r1 = b[2 * k + 1];
        if (k + 1 < n) {
            r0 -= upper_[k](0, 0) * x[2 * k + 2] + upper_[k](0, 1) * x[2 * k + 3];
            r1 -= upper_[k](1, 0) * x[2 * k + 2] + upper_[k](1, 1) * x[2 * k + 3];
        }
        x[2 * k] = pivot_inv[k](0, 0) * r0 + pivot_inv[k](0, 1) * r1;
        x[2 * k + 1] = pivot_inv[k](1, 0) * r0 + pivot_inv[k](1, 1) * r1;
        if (!std::isfinite(x[2 * k]) || !std::isfinite(x[2 * k + 1]))
            fail(ErrorKind::numerical_breakdown, "non-finite value in block-tridiagonal solve");
    }
    return x;
}

std::vector<double> BlockTridiagonal::dense() const {
    const std::size_t n = blocks();
    const std::size_t m = 2 * n;
    std::vector<double> a(m * m, 0.0);
    auto put = [&](std::size_t bi, std::size_t bj, const Block2& blk) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) a[(2 * bi + r) * m + 2 * bj + c] = blk(r, c);
    };
    for (std::size_t i = 0; i < n; ++i) {
        put(i, i, diag_[i]);
        if (i > 0) put(i, i - 1, lower_[i]);
        if (i + 1 < n) put(i, i + 1, upper_[i]);
    }
    return a;
}

} // namespace pwave
