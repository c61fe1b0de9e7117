#ifndef SSAKIT_EMBED_HPP
#define SSAKIT_EMBED_HPP

#include <numeric>
#include <variant>
#include <vector>

#include "ssakit/common.hpp"

namespace ssakit {

/// Shape metadata of a 1D embedding: series length n, window L, K = n-L+1.
struct Shape1D {
    Index n = 0;
    Index window = 0;
    Index k() const { return n - window + 1; }
};

/// Shape metadata of a stacked (multichannel) embedding. The trajectory
/// matrix is the horizontal stack of the per-channel Hankel matrices, so
/// its width is sum of K_p = N_p - L + 1.
struct ShapeMssa {
    std::vector<Index> lengths;
    Index window = 0;
    Index k(Index p) const { return lengths[static_cast<std::size_t>(p)] - window + 1; }
    Index total_k() const {
        Index t = 0;
        for (std::size_t p = 0; p < lengths.size(); ++p) t += k(static_cast<Index>(p));
        return t;
    }
    std::vector<Index> k_list() const {
        std::vector<Index> ks(lengths.size());
        for (std::size_t p = 0; p < lengths.size(); ++p) ks[p] = k(static_cast<Index>(p));
        return ks;
    }
};

/// Shape metadata of a 2D embedding: field nx x ny, window wx x wy.
/// Windows are vectorized column-major (row offset varies fastest), and so
/// are window positions; the trajectory matrix is (wx*wy) x (kx*ky).
struct Shape2D {
    Index nx = 0, ny = 0;
    Index wx = 0, wy = 0;
    Index kx() const { return nx - wx + 1; }
    Index ky() const { return ny - wy + 1; }
};

using SourceShape = std::variant<Shape1D, ShapeMssa, Shape2D>;

enum class StructureTag { Hankel, StackedHankel, HankelBlockHankel };

struct TrajectoryMatrix {
    Matrix mat;
    SourceShape shape;

    StructureTag tag() const {
        switch (shape.index()) {
            case 0: return StructureTag::Hankel;
            case 1: return StructureTag::StackedHankel;
            default: return StructureTag::HankelBlockHankel;
        }
    }
};

/// L x K Hankel embedding of a series: entry(i,j) = x[i+j] (0-based).
inline TrajectoryMatrix embed_1d(const Vector& series, Index window) {
    const Index n = series.size();
    detail::require(n >= 2, "embed_1d: series must have at least 2 samples");
    detail::require_data(detail::all_finite(series), "embed_1d: series has non-finite values");
    detail::require(window >= 2 && window <= n - 1,
                    "embed_1d: window must satisfy 2 <= L <= N-1");
    const Index k = n - window + 1;
    Matrix m(window, k);
    for (Index j = 0; j < k; ++j) m.col(j) = series.segment(j, window);
    return {std::move(m), Shape1D{n, window}};
}

/// Horizontal stack of per-channel Hankel matrices, [H(X1) : ... : H(Xs)].
inline TrajectoryMatrix embed_mssa(const MultiSeries& series, Index window) {
    detail::require(series.channel_count() >= 1, "embed_mssa: at least one channel required");
    ShapeMssa shape;
    shape.window = window;
    for (const auto& c : series.channels) {
        detail::require(c.size() >= 2, "embed_mssa: every channel needs at least 2 samples");
        detail::require_data(detail::all_finite(c), "embed_mssa: channel has non-finite values");
        detail::require(window >= 2 && window <= c.size() - 1,
                        "embed_mssa: window must satisfy 2 <= L <= N_p-1 for every channel");
        shape.lengths.push_back(c.size());
    }
    Matrix m(window, shape.total_k());
    Index off = 0;
    for (const auto& c : series.channels) {
        const Index kp = c.size() - window + 1;
        for (Index j = 0; j < kp; ++j) m.col(off + j) = c.segment(j, window);
        off += kp;
    }
    return {std::move(m), std::move(shape)};
}

/// Hankel-block-Hankel embedding of a field. Rows enumerate in-window
/// offsets (ix + iy*wx), columns enumerate window positions (jx + jy*kx);
/// entry = field(ix+jx, iy+jy).
inline TrajectoryMatrix embed_2d(const Matrix& field, Index wx, Index wy) {
    const Index nx = field.rows(), ny = field.cols();
    detail::require(nx >= 2 && ny >= 2, "embed_2d: field must be at least 2x2");
    detail::require_data(detail::all_finite(field), "embed_2d: field has non-finite values");
    detail::require(wx >= 2 && wx <= nx - 1, "embed_2d: Lx must satisfy 2 <= Lx <= Nx-1");
    detail::require(wy >= 2 && wy <= ny - 1, "embed_2d: Ly must satisfy 2 <= Ly <= Ny-1");
    const Shape2D shape{nx, ny, wx, wy};
    const Index kx = shape.kx(), ky = shape.ky();
    Matrix m(wx * wy, kx * ky);
    for (Index jy = 0; jy < ky; ++jy)
        for (Index jx = 0; jx < kx; ++jx) {
            const Index col = jx + jy * kx;
            for (Index iy = 0; iy < wy; ++iy)
                for (Index ix = 0; ix < wx; ++ix)
                    m(ix + iy * wx, col) = field(ix + jx, iy + jy);
        }
    return {std::move(m), shape};
}

}  // namespace ssakit

#endif  // SSAKIT_EMBED_HPP
