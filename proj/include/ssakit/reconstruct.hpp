#ifndef SSAKIT_RECONSTRUCT_HPP
#define SSAKIT_RECONSTRUCT_HPP

#include <set>
#include <variant>
#include <vector>

#include "ssakit/decompose.hpp"

namespace ssakit {

using Group = std::vector<Index>;
using Reconstructed = std::variant<Vector, MultiSeries, Matrix>;

/// Per-channel pieces of an MSSA right singular vector, split at the K_p
/// boundaries, plus unit-normalized copies. Parts with near-zero norm are
/// flagged degenerate and keep a zero normalized copy.
struct FactorVectorParts {
    std::vector<Vector> parts;
    std::vector<Vector> normalized;
    std::vector<double> norms;
    std::vector<bool> degenerate;

    static constexpr double kDegenerateNorm = 1e-12;

    Index channel_count() const { return static_cast<Index>(parts.size()); }
};

inline FactorVectorParts split_factor_vector(const Vector& v, const std::vector<Index>& k_list) {
    Index total = 0;
    for (Index k : k_list) {
        detail::require(k >= 1, "split_factor_vector: every K_p must be positive");
        total += k;
    }
    detail::require(total == v.size(), "split_factor_vector: sum of K_p must equal length of V");
    FactorVectorParts out;
    Index off = 0;
    for (Index k : k_list) {
        Vector part = v.segment(off, k);
        const double nrm = part.norm();
        const bool degen = nrm < FactorVectorParts::kDegenerateNorm;
        out.normalized.push_back(degen ? Vector::Zero(k) : Vector(part / nrm));
        out.parts.push_back(std::move(part));
        out.norms.push_back(nrm);
        out.degenerate.push_back(degen);
        off += k;
    }
    return out;
}

/// Split of the i-th right singular vector of an MSSA decomposition.
inline FactorVectorParts factor_parts(const Decomposition& dec, Index i) {
    detail::require(dec.is_mssa(), "factor_parts: decomposition is not multichannel");
    return split_factor_vector(dec.v(i), std::get<ShapeMssa>(dec.shape()).k_list());
}

/// Left singular vector of a 2D decomposition reshaped to its Lx x Ly window.
inline Matrix left_field(const Decomposition& dec, Index i) {
    detail::require(dec.is_2d(), "left_field: decomposition is not 2D");
    const auto& sh = std::get<Shape2D>(dec.shape());
    return Eigen::Map<const Matrix>(dec.u(i).data(), sh.wx, sh.wy);
}

/// Right singular vector of a 2D decomposition reshaped to Kx x Ky.
inline Matrix right_field(const Decomposition& dec, Index i) {
    detail::require(dec.is_2d(), "right_field: decomposition is not 2D");
    const auto& sh = std::get<Shape2D>(dec.shape());
    return Eigen::Map<const Matrix>(dec.v(i).data(), sh.kx(), sh.ky());
}

namespace detail {

inline void check_group(const Decomposition& dec, const Group& group) {
    std::set<Index> seen;
    for (Index i : group) {
        require(i >= 1 && i <= dec.size(), "reconstruct: component index out of range");
        require(seen.insert(i).second, "reconstruct: duplicate component index");
    }
}

inline Matrix group_matrix(const Decomposition& dec, const Group& group, Index rows, Index cols) {
    Matrix m = Matrix::Zero(rows, cols);
    for (Index i : group) m.noalias() += dec.sigma(i) * dec.u(i) * dec.v(i).transpose();
    return m;
}

/// Diagonal averaging of an L x K block back to a length L+K-1 series.
inline Vector diagonal_average(const Eigen::Ref<const Matrix>& m) {
    const Index l = m.rows(), k = m.cols();
    Vector acc = Vector::Zero(l + k - 1);
    Eigen::VectorXi cnt = Eigen::VectorXi::Zero(l + k - 1);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < l; ++i) {
            acc[i + j] += m(i, j);
            cnt[i + j] += 1;
        }
    for (Index t = 0; t < acc.size(); ++t) acc[t] /= cnt[t];
    return acc;
}

/// Two-level averaging of a (wx*wy) x (kx*ky) block back to the field.
inline Matrix average_2d(const Matrix& m, const Shape2D& sh) {
    Matrix acc = Matrix::Zero(sh.nx, sh.ny);
    Matrix cnt = Matrix::Zero(sh.nx, sh.ny);
    const Index kx = sh.kx(), ky = sh.ky();
    for (Index jy = 0; jy < ky; ++jy)
        for (Index jx = 0; jx < kx; ++jx) {
            const Index col = jx + jy * kx;
            for (Index iy = 0; iy < sh.wy; ++iy)
                for (Index ix = 0; ix < sh.wx; ++ix) {
                    acc(ix + jx, iy + jy) += m(ix + iy * sh.wx, col);
                    cnt(ix + jx, iy + jy) += 1.0;
                }
        }
    return acc.cwiseQuotient(cnt);
}

}  // namespace detail

/// Sum of the selected elementary matrices projected back to the source
/// shape by diagonal averaging (per channel for MSSA, two-level for 2D).
/// An empty group yields the zero object of the source shape.
inline Reconstructed reconstruct(const Decomposition& dec, const Group& group) {
    detail::check_group(dec, group);
    if (dec.is_1d()) {
        const auto& sh = std::get<Shape1D>(dec.shape());
        Matrix m = detail::group_matrix(dec, group, sh.window, sh.k());
        return detail::diagonal_average(m);
    }
    if (dec.is_mssa()) {
        const auto& sh = std::get<ShapeMssa>(dec.shape());
        Matrix m = detail::group_matrix(dec, group, sh.window, sh.total_k());
        MultiSeries out;
        Index off = 0;
        for (std::size_t p = 0; p < sh.lengths.size(); ++p) {
            const Index kp = sh.k(static_cast<Index>(p));
            out.channels.push_back(detail::diagonal_average(m.middleCols(off, kp)));
            off += kp;
        }
        return out;
    }
    const auto& sh = std::get<Shape2D>(dec.shape());
    Matrix m = detail::group_matrix(dec, group, sh.wx * sh.wy, sh.kx() * sh.ky());
    return detail::average_2d(m, sh);
}

inline Vector reconstruct_series(const Decomposition& dec, const Group& group) {
    detail::require(dec.is_1d(), "reconstruct_series: decomposition is not 1D");
    return std::get<Vector>(reconstruct(dec, group));
}

inline MultiSeries reconstruct_multi(const Decomposition& dec, const Group& group) {
    detail::require(dec.is_mssa(), "reconstruct_multi: decomposition is not multichannel");
    return std::get<MultiSeries>(reconstruct(dec, group));
}

inline Matrix reconstruct_field(const Decomposition& dec, const Group& group) {
    detail::require(dec.is_2d(), "reconstruct_field: decomposition is not 2D");
    return std::get<Matrix>(reconstruct(dec, group));
}

inline Reconstructed elementary_component(const Decomposition& dec, Index i) {
    return reconstruct(dec, Group{i});
}

}  // namespace ssakit

#endif  // SSAKIT_RECONSTRUCT_HPP
