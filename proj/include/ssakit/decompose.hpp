#ifndef SSAKIT_DECOMPOSE_HPP
#define SSAKIT_DECOMPOSE_HPP

#include <algorithm>
#include <utility>
#include <vector>

#include "ssakit/embed.hpp"

namespace ssakit {

/// One rank-one term of the SVD: sigma = sqrt(lambda), unit vectors U (length
/// L) and V (length K).
struct Eigentriple {
    double sigma = 0.0;
    Vector u;
    Vector v;
};

struct DecomposeOptions {
    /// Singular values below rank_tol * sigma_1 do not count towards the rank d.
    double rank_tol = 1e-9;
    /// Keep at most this many eigentriples (0 = keep all of the thin SVD).
    Index max_rank = 0;
};

/// Ordered SVD of a trajectory matrix together with the source shape needed
/// to map groups of components back to series/field form.
///
/// Component indices on the public surface are 1-based throughout, matching
/// the usual eigentriple numbering; `rank()` is the number of components
/// whose singular value exceeds the rank tolerance, while indices up to
/// `size()` stay addressable so that near-zero components can be inspected.
class Decomposition {
  public:
    Decomposition(std::vector<Eigentriple> triples, Index d, DecomposeOptions opts,
                  SourceShape shape)
        : triples_(std::move(triples)), d_(d), opts_(opts), shape_(std::move(shape)) {}

    Index size() const { return static_cast<Index>(triples_.size()); }
    Index rank() const { return d_; }
    const DecomposeOptions& options() const { return opts_; }
    const SourceShape& shape() const { return shape_; }

    const Eigentriple& triple(Index i) const {
        detail::require(i >= 1 && i <= size(), "component index out of range");
        return triples_[static_cast<std::size_t>(i - 1)];
    }
    double sigma(Index i) const { return triple(i).sigma; }
    double lambda(Index i) const { const double s = triple(i).sigma; return s * s; }
    const Vector& u(Index i) const { return triple(i).u; }
    const Vector& v(Index i) const { return triple(i).v; }

    /// First `count` left singular vectors (default: the first rank() of them).
    std::vector<Vector> left_vectors(Index count = -1) const {
        if (count < 0) count = d_;
        detail::require(count <= size(), "requested more vectors than stored");
        std::vector<Vector> out;
        out.reserve(static_cast<std::size_t>(count));
        for (Index i = 1; i <= count; ++i) out.push_back(u(i));
        return out;
    }
    std::vector<Vector> right_vectors(Index count = -1) const {
        if (count < 0) count = d_;
        detail::require(count <= size(), "requested more vectors than stored");
        std::vector<Vector> out;
        out.reserve(static_cast<std::size_t>(count));
        for (Index i = 1; i <= count; ++i) out.push_back(v(i));
        return out;
    }

    bool is_1d() const { return std::holds_alternative<Shape1D>(shape_); }
    bool is_mssa() const { return std::holds_alternative<ShapeMssa>(shape_); }
    bool is_2d() const { return std::holds_alternative<Shape2D>(shape_); }

  private:
    std::vector<Eigentriple> triples_;
    Index d_;
    DecomposeOptions opts_;
    SourceShape shape_;
};

/// Full dense SVD of the trajectory matrix into eigentriples, sigma
/// nonincreasing. Signs are fixed so that the largest-magnitude entry of
/// each U_i is positive (first such entry on ties), which keeps outputs
/// reproducible across platforms.
inline Decomposition decompose(const TrajectoryMatrix& tm, const DecomposeOptions& opts = {}) {
    detail::require_data(detail::all_finite(tm.mat), "decompose: matrix has non-finite entries");
    detail::require(opts.rank_tol >= 0.0, "decompose: rank_tol must be nonnegative");

    Eigen::BDCSVD<Matrix> svd(tm.mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Index count = sv.size();
    if (opts.max_rank > 0) count = std::min(count, opts.max_rank);

    std::vector<Eigentriple> triples;
    triples.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        Vector u = svd.matrixU().col(i);
        Vector v = svd.matrixV().col(i);
        Index peak = 0;
        u.cwiseAbs().maxCoeff(&peak);
        if (u[peak] < 0.0) {
            u = -u;
            v = -v;
        }
        triples.push_back({sv[i], std::move(u), std::move(v)});
    }

    const double s1 = sv.size() > 0 ? sv[0] : 0.0;
    Index d = 0;
    for (Index i = 0; i < count; ++i)
        if (sv[i] > opts.rank_tol * s1 && sv[i] > 0.0) ++d;

    return Decomposition(std::move(triples), d, opts, tm.shape);
}

}  // namespace ssakit

#endif  // SSAKIT_DECOMPOSE_HPP
