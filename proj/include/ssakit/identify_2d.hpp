#ifndef SSAKIT_IDENTIFY_2D_HPP
#define SSAKIT_IDENTIFY_2D_HPP

#include <vector>

#include "ssakit/identify.hpp"
#include "ssakit/reconstruct.hpp"

namespace ssakit {

/// Low-frequency method for 2D decompositions: candidates are elementary
/// reconstructed arrays or devectorized left/right singular vectors, and
/// J = { i : T(Y_i; w1, w2) >= T0 } with T summed over the closed frequency
/// rectangle [0, w1] x [0, w2]. Zero fields are excluded and flagged.
inline GroupingResult identify_trend_2d(const std::vector<Matrix>& fields, double omega1,
                                        double omega2, double threshold,
                                        const std::vector<Index>& indices = {}) {
    detail::require(!fields.empty(), "identify_trend_2d: no candidates");
    detail::require(threshold >= 0.0 && threshold <= 1.0,
                    "identify_trend_2d: threshold must lie in [0, 1]");

    GroupingResult res;
    res.method = IdMethod::Trend;
    res.threshold = threshold;
    res.candidates = indices;
    if (res.candidates.empty())
        for (std::size_t t = 0; t < fields.size(); ++t)
            res.candidates.push_back(static_cast<Index>(t) + 1);
    detail::require(res.candidates.size() == fields.size(),
                    "identify_trend_2d: index set does not match the candidate list");

    for (std::size_t t = 0; t < fields.size(); ++t) {
        const Periodogram2D pg = periodogram_2d(fields[t]);
        if (pg.degenerate) {
            res.trend_measure.push_back(0.0);
            res.excluded.push_back(res.candidates[t]);
            continue;
        }
        const double measure = freq_contribution_2d(pg, omega1, omega2);
        res.trend_measure.push_back(measure);
        if (measure >= threshold) res.singletons.push_back(res.candidates[t]);
    }
    return res;
}

/// Candidate fields of the requested kind for the first `count` components
/// of a 2D decomposition.
inline std::vector<Matrix> candidates_2d(const Decomposition& dec, SourceKind kind,
                                         Index count = -1) {
    detail::require(dec.is_2d(), "candidates_2d: decomposition is not 2D");
    if (count < 0) count = dec.rank();
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index i = 1; i <= count; ++i) {
        switch (kind) {
            case SourceKind::Eigenvectors: out.push_back(left_field(dec, i)); break;
            case SourceKind::FactorVectors: out.push_back(right_field(dec, i)); break;
            case SourceKind::Reconstructed:
                out.push_back(std::get<Matrix>(elementary_component(dec, i)));
                break;
        }
    }
    return out;
}

}  // namespace ssakit

#endif  // SSAKIT_IDENTIFY_2D_HPP
