#ifndef SSAKIT_IDENTIFY_MSSA_HPP
#define SSAKIT_IDENTIFY_MSSA_HPP

#include <optional>
#include <vector>

#include "ssakit/identify.hpp"
#include "ssakit/reconstruct.hpp"

namespace ssakit {

// Left singular vectors of an MSSA decomposition are plain length-L series,
// so the left-vector variants coincide with the 1D methods.

inline GroupingResult identify_trend_mssa_left(const std::vector<Vector>& u,
                                               const TrendIdConfig& cfg) {
    return identify_trend(u, cfg);
}

inline GroupingResult identify_periodic_freq_mssa_left(const std::vector<Vector>& u,
                                                       const FreqIdConfig& cfg) {
    return identify_periodic_freq(u, cfg);
}

inline GroupingResult identify_periodic_angle_mssa_left(const std::vector<Vector>& u,
                                                        const AngleIdConfig& cfg) {
    return identify_periodic_angle(u, cfg);
}

// ---------------------------------------------------------------------------
// Right-vector / elementary-series variants, aggregating over channels

namespace detail {

/// Degeneracy flags for a candidate's channel parts when none were supplied:
/// a part counts as degenerate below 1e-12 of the largest part norm, which
/// catches the numerical-noise residue left in channels a component does not
/// touch.
inline std::vector<bool> part_degeneracy(const std::vector<Vector>& parts) {
    double max_norm = 0.0;
    std::vector<double> norms;
    norms.reserve(parts.size());
    for (const auto& part : parts) {
        norms.push_back(part.norm());
        max_norm = std::max(max_norm, norms.back());
    }
    std::vector<bool> degenerate(parts.size());
    for (std::size_t p = 0; p < parts.size(); ++p)
        degenerate[p] = norms[p] <= 1e-12 * max_norm || norms[p] == 0.0;
    return degenerate;
}

}  // namespace detail

/// Low-frequency method on per-channel items: for each candidate take the
/// maximum of T over its non-degenerate channel parts. Works for split right
/// singular vectors and for elementary reconstructed multichannel series
/// alike; a candidate whose parts are all degenerate is excluded and flagged.
inline GroupingResult identify_trend_mssa_right(const std::vector<std::vector<Vector>>& items,
                                                const std::vector<std::vector<bool>>& degenerate,
                                                const TrendIdConfig& cfg) {
    detail::require(!items.empty(), "identify_trend_mssa_right: no candidates");
    detail::require(degenerate.size() == items.size(),
                    "identify_trend_mssa_right: degeneracy flags do not match the candidates");
    detail::require(cfg.omega1 >= 0.0 && cfg.omega1 <= cfg.omega2 && cfg.omega2 <= 0.5,
                    "identify_trend_mssa_right: need 0 <= w1 <= w2 <= 0.5");
    detail::require(cfg.threshold >= 0.0 && cfg.threshold <= 1.0,
                    "identify_trend_mssa_right: threshold must lie in [0, 1]");

    GroupingResult res;
    res.method = IdMethod::Trend;
    res.threshold = cfg.threshold;
    res.candidates = cfg.indices;
    if (res.candidates.empty())
        for (std::size_t t = 0; t < items.size(); ++t)
            res.candidates.push_back(static_cast<Index>(t) + 1);
    detail::require(res.candidates.size() == items.size(),
                    "identify_trend_mssa_right: index set does not match the candidate list");

    for (std::size_t t = 0; t < items.size(); ++t) {
        detail::require(!items[t].empty(), "identify_trend_mssa_right: candidate has no channels");
        detail::require(degenerate[t].size() == items[t].size(),
                        "identify_trend_mssa_right: degeneracy flags do not match the channels");
        double best = 0.0;
        bool any = false;
        for (std::size_t p = 0; p < items[t].size(); ++p) {
            if (degenerate[t][p]) continue;
            const Periodogram pg = periodogram_1d(items[t][p]);
            if (pg.degenerate) continue;
            best = std::max(best, freq_contribution(pg, cfg.omega1, cfg.omega2));
            any = true;
        }
        res.trend_measure.push_back(any ? best : 0.0);
        if (!any) {
            res.excluded.push_back(res.candidates[t]);
            continue;
        }
        if (best >= cfg.threshold) res.singletons.push_back(res.candidates[t]);
    }
    return res;
}

inline GroupingResult identify_trend_mssa_right(const std::vector<std::vector<Vector>>& items,
                                                const TrendIdConfig& cfg) {
    std::vector<std::vector<bool>> degenerate;
    degenerate.reserve(items.size());
    for (const auto& parts : items) degenerate.push_back(detail::part_degeneracy(parts));
    return identify_trend_mssa_right(items, degenerate, cfg);
}

inline GroupingResult identify_trend_mssa_right(const std::vector<FactorVectorParts>& v,
                                                const TrendIdConfig& cfg) {
    std::vector<std::vector<Vector>> items;
    std::vector<std::vector<bool>> degenerate;
    items.reserve(v.size());
    for (const auto& fv : v) {
        items.push_back(fv.parts);
        degenerate.push_back(fv.degenerate);
    }
    return identify_trend_mssa_right(items, degenerate, cfg);
}

inline GroupingResult identify_trend_mssa_right(const std::vector<MultiSeries>& series,
                                                const TrendIdConfig& cfg) {
    std::vector<std::vector<Vector>> items;
    items.reserve(series.size());
    for (const auto& ms : series) items.push_back(ms.channels);
    return identify_trend_mssa_right(items, cfg);
}

/// Frequency method on split right singular vectors. Step 1 runs per channel
/// on that channel's own K_p grid and the admitted sets are unioned; step 2
/// takes rho as the maximum over non-degenerate channels of the two-neighbour
/// periodogram sum. Degenerate parts never vote.
inline GroupingResult identify_periodic_freq_mssa_right(const std::vector<FactorVectorParts>& v,
                                                        const FreqIdConfig& cfg) {
    const Index d = static_cast<Index>(v.size());
    detail::require(d >= 1, "identify_periodic_freq_mssa_right: need at least one vector");
    detail::require(cfg.s0 >= 0, "identify_periodic_freq_mssa_right: s0 must be nonnegative");
    detail::require(cfg.rho0 >= 0.0 && cfg.rho0 <= 1.0,
                    "identify_periodic_freq_mssa_right: rho0 must lie in [0, 1]");
    const Index s = v.front().channel_count();
    for (const auto& fv : v)
        detail::require(fv.channel_count() == s,
                        "identify_periodic_freq_mssa_right: channel counts differ");

    // Per-channel periodograms of the parts. The normalized periodogram is
    // scale-invariant, so computing it from the raw part equals using the
    // unit-normalized copy and keeps the s=1 case bit-identical to 1D.
    std::vector<std::vector<std::optional<Periodogram>>> pgs(
        static_cast<std::size_t>(s), std::vector<std::optional<Periodogram>>(v.size()));
    for (Index p = 0; p < s; ++p)
        for (Index i = 0; i < d; ++i) {
            const auto& fv = v[static_cast<std::size_t>(i)];
            if (!fv.degenerate[static_cast<std::size_t>(p)])
                pgs[p][i] = periodogram_1d(fv.parts[static_cast<std::size_t>(p)]);
        }

    GroupingResult res;
    res.method = IdMethod::Freq;
    res.threshold = cfg.rho0;
    for (Index i = 1; i <= d; ++i) res.candidates.push_back(i);

    std::vector<bool> in_j1(static_cast<std::size_t>(std::max<Index>(d - 1, 0)), false);
    std::vector<bool> in_j2(static_cast<std::size_t>(d), false);
    for (Index p = 0; p < s; ++p) {
        std::vector<std::optional<ArgmaxFreq>> am(static_cast<std::size_t>(d));
        for (Index i = 0; i < d; ++i)
            if (pgs[p][i]) am[i] = argmax_frequency(*pgs[p][i]);
        const Index kp = v.front().parts[static_cast<std::size_t>(p)].size();
        const double half = static_cast<double>(kp) / 2.0;
        for (Index i = 0; i + 1 < d; ++i)
            if (am[i] && am[i + 1] && am[i]->k > 0 && am[i + 1]->k > 0 &&
                std::abs(am[i]->k - am[i + 1]->k) <= cfg.s0)
                in_j1[static_cast<std::size_t>(i)] = true;
        for (Index i = 0; i < d; ++i)
            if (am[i] &&
                std::abs(static_cast<double>(am[i]->k) - half) <= static_cast<double>(cfg.s0))
                in_j2[static_cast<std::size_t>(i)] = true;
    }

    for (Index i = 0; i + 1 < d; ++i) {
        if (!in_j1[static_cast<std::size_t>(i)]) continue;
        double rho = 0.0;
        for (Index p = 0; p < s; ++p)
            if (pgs[p][i] && pgs[p][i + 1])
                rho = std::max(rho, detail::rho_pair_measure(*pgs[p][i], *pgs[p][i + 1]));
        res.j1.emplace_back(i + 1, i + 2);
        res.rho_pairs.push_back(rho);
        if (rho >= cfg.rho0) res.pairs.emplace_back(i + 1, i + 2);
    }
    for (Index i = 0; i < d; ++i) {
        if (!in_j2[static_cast<std::size_t>(i)]) continue;
        double rho = 0.0;
        for (Index p = 0; p < s; ++p)
            if (pgs[p][i]) rho = std::max(rho, detail::rho_single_measure(*pgs[p][i]));
        res.j2.push_back(i + 1);
        res.rho_singles.push_back(rho);
        if (rho >= cfg.rho0) res.singletons.push_back(i + 1);
    }
    return res;
}

/// Angle-regularity method on split right singular vectors: tau-tilde per
/// channel on the raw parts, aggregated by the channel minimum, then the
/// standard elimination / ordering / stopping pipeline.
inline GroupingResult identify_periodic_angle_mssa_right(const std::vector<FactorVectorParts>& v,
                                                         const AngleIdConfig& cfg) {
    const Index r = static_cast<Index>(v.size());
    detail::require(r >= 2, "identify_periodic_angle_mssa_right: need at least 2 vectors");
    if (cfg.stop == AngleIdConfig::Stop::Count)
        detail::require(cfg.m >= 0 && 2 * cfg.m <= r,
                        "identify_periodic_angle_mssa_right: need m <= r/2");
    else
        detail::require(cfg.t0 >= 0.0, "identify_periodic_angle_mssa_right: t0 must be nonnegative");
    const Index s = v.front().channel_count();
    for (const auto& fv : v)
        detail::require(fv.channel_count() == s,
                        "identify_periodic_angle_mssa_right: channel counts differ");

    GroupingResult res;
    res.method = IdMethod::Angle;
    res.threshold = cfg.stop == AngleIdConfig::Stop::Threshold
                        ? cfg.t0
                        : std::numeric_limits<double>::quiet_NaN();
    for (Index i = 1; i <= r; ++i) res.candidates.push_back(i);

    std::vector<double> pair_value(static_cast<std::size_t>(r - 1), detail::kInf);
    for (Index j = 0; j + 1 < r; ++j) {
        double best = detail::kInf;
        for (Index p = 0; p < s; ++p) {
            const auto sp = static_cast<std::size_t>(p);
            if (v[j].degenerate[sp] || v[j + 1].degenerate[sp]) continue;
            try {
                best = std::min(best, tau_norm(v[j].parts[sp], v[j + 1].parts[sp]));
            } catch (const DataError&) {
                // channel pair has a point at the origin: skip this channel
            }
        }
        pair_value[static_cast<std::size_t>(j)] = best;
        if (std::isinf(best)) res.excluded.push_back(j + 1);
    }
    const auto scan = detail::angle_scan(std::move(pair_value));
    res.tau_pairs = scan.pair_value;
    res.surviving = scan.order;
    for (Index j : scan.order) res.tau_sorted.push_back(scan.pair_value[j - 1]);
    for (Index j : detail::angle_take(scan, cfg)) res.pairs.emplace_back(j, j + 1);
    std::sort(res.pairs.begin(), res.pairs.end());
    return res;
}

}  // namespace ssakit

#endif  // SSAKIT_IDENTIFY_MSSA_HPP
