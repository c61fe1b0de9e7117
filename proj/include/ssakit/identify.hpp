#ifndef SSAKIT_IDENTIFY_HPP
#define SSAKIT_IDENTIFY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "ssakit/spectral.hpp"

namespace ssakit {

enum class IdMethod { Trend, Freq, Angle };

/// Where candidate vectors for trend identification come from. The measure
/// is applied verbatim to whichever kind is supplied.
enum class SourceKind { Eigenvectors, FactorVectors, Reconstructed };

struct TrendIdConfig {
    double omega1 = 0.0;
    double omega2 = 0.5;
    double threshold = 0.0;        ///< T0 in [0, 1]
    std::vector<Index> indices;    ///< candidate group I; empty means 1..n
    SourceKind source = SourceKind::Eigenvectors;
};

struct FreqIdConfig {
    Index s0 = 1;                  ///< grid slack, in grid steps
    double rho0 = 0.9;             ///< threshold in [0, 1]
};

struct AngleIdConfig {
    enum class Stop { Count, Threshold };
    Stop stop = Stop::Threshold;
    Index m = 0;                   ///< expected number of e-m harmonics (count mode)
    double t0 = 0.0;               ///< threshold (threshold mode)

    static AngleIdConfig by_count(Index m) { return {Stop::Count, m, 0.0}; }
    static AngleIdConfig by_threshold(double t0) { return {Stop::Threshold, 0, t0}; }
};

using IndexPair = std::pair<Index, Index>;

/// Common result of the identification methods. `pairs` and `singletons`
/// form the identified set J; the remaining fields record the per-candidate
/// measures and intermediate sets of whichever method produced the result.
struct GroupingResult {
    IdMethod method = IdMethod::Trend;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    std::vector<Index> candidates;          ///< candidate component indices I

    std::vector<IndexPair> pairs;           ///< selected consecutive pairs
    std::vector<Index> singletons;          ///< selected singleton components
    std::vector<Index> excluded;            ///< degenerate candidates, flagged

    // trend method: T value per candidate, aligned with `candidates`
    std::vector<double> trend_measure;

    // frequency method
    std::vector<Index> argmax_k;            ///< periodogram argmax per candidate
    std::vector<double> argmax_theta;
    std::vector<IndexPair> j1;              ///< step-1 pair set
    std::vector<Index> j2;                  ///< step-1 frequency-0.5 set
    std::vector<double> rho_pairs;          ///< aligned with j1
    std::vector<double> rho_singles;        ///< aligned with j2

    // angle method: value of tau-tilde for pair (j, j+1) at position j-1
    std::vector<double> tau_pairs;
    std::vector<Index> surviving;           ///< pair positions after elimination, value-ascending
    std::vector<double> tau_sorted;         ///< their values, ascending

    /// Flattened, sorted union of all selected component indices.
    std::vector<Index> indices() const {
        std::vector<Index> out(singletons);
        for (auto [i, j] : pairs) {
            out.push_back(i);
            out.push_back(j);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

// ---------------------------------------------------------------------------
// Angle-regularity measure

/// Angles between consecutive points (p_k, q_k) of the 2D scatter of P vs Q,
/// plus their mean and variance. Each angle lies in [0, pi].
struct AngleSequence {
    Vector theta;
    double mean = 0.0;
    double var = 0.0;
};

inline AngleSequence angle_sequence(const Vector& p, const Vector& q) {
    detail::require(p.size() == q.size(), "angle_sequence: vectors must have equal length");
    const Index l = p.size();
    detail::require(l >= 3, "angle_sequence: need at least 3 points");

    double max_norm = 0.0;
    for (Index k = 0; k < l; ++k) max_norm = std::max(max_norm, std::hypot(p[k], q[k]));
    const double eps = 1e-12 * max_norm;
    AngleSequence seq;
    seq.theta.resize(l - 1);
    for (Index k = 0; k + 1 < l; ++k) {
        detail::require_data(std::hypot(p[k], q[k]) > eps && std::hypot(p[k + 1], q[k + 1]) > eps,
                             "angle_sequence: point too close to the origin");
        const double dot = p[k] * p[k + 1] + q[k] * q[k + 1];
        const double cross = p[k] * q[k + 1] - p[k + 1] * q[k];
        // atan2 of |cross| vs dot is the arccos form, stable near 0 and pi
        seq.theta[k] = std::atan2(std::abs(cross), dot);
    }
    seq.mean = seq.theta.mean();
    seq.var = (seq.theta.array() - seq.mean).square().sum() / static_cast<double>(l - 1);
    return seq;
}

/// Sample variance of the angle sequence of the (P, Q) scatter; zero exactly
/// when consecutive points advance by a constant angle (spiral).
inline double tau(const Vector& p, const Vector& q) { return angle_sequence(p, q).var; }

/// tau / min(1, mean^2): penalizes pairs whose angles are merely uniformly
/// small. Zero variance yields zero regardless of the mean.
inline double tau_norm(const Vector& p, const Vector& q) {
    const AngleSequence seq = angle_sequence(p, q);
    if (seq.var == 0.0) return 0.0;
    return seq.var / std::min(1.0, seq.mean * seq.mean);
}

// ---------------------------------------------------------------------------
// Method internals, shared with the MSSA variants and the experiment harness

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Result of scanning consecutive pair measures for the angle method.
struct AngleScan {
    std::vector<double> pair_value;   ///< value for pair (j, j+1) at [j-1]; +inf if degenerate
    std::vector<Index> order;         ///< surviving positions j, ascending by value
};

/// Overlap elimination: pair j survives against its neighbours when its
/// value is strictly below the left one and no greater than the right one,
/// which is what the sequential drop rule keeps. Survivors never share a
/// vector. They are then ordered by value (ties by position).
inline AngleScan angle_scan(std::vector<double> pair_value) {
    AngleScan scan;
    const Index r1 = static_cast<Index>(pair_value.size());  // = r - 1
    scan.pair_value = std::move(pair_value);
    for (Index j = 1; j <= r1; ++j) {
        const double v = scan.pair_value[j - 1];
        const bool left_ok = (j == 1) || v < scan.pair_value[j - 2];
        const bool right_ok = (j == r1) || v <= scan.pair_value[j];
        if (left_ok && right_ok) scan.order.push_back(j);
    }
    std::stable_sort(scan.order.begin(), scan.order.end(), [&](Index a, Index b) {
        return scan.pair_value[a - 1] < scan.pair_value[b - 1];
    });
    return scan;
}

/// Stopping criterion: count mode takes the m smallest surviving values,
/// threshold mode the ascending prefix with value strictly below t0.
/// Degenerate (+inf) pairs are never selected.
inline std::vector<Index> angle_take(const AngleScan& scan, const AngleIdConfig& cfg) {
    std::vector<Index> taken;
    for (Index j : scan.order) {
        const double v = scan.pair_value[j - 1];
        if (std::isinf(v)) break;
        if (cfg.stop == AngleIdConfig::Stop::Count) {
            if (static_cast<Index>(taken.size()) >= cfg.m) break;
        } else {
            if (!(v < cfg.t0)) break;
        }
        taken.push_back(j);
    }
    return taken;
}

/// Step-1/step-2 state of the frequency method on a single grid.
struct FreqScan {
    Index grid = 0;                       ///< number of series points (L)
    std::vector<Index> argmax_k;
    std::vector<double> argmax_theta;
    std::vector<IndexPair> j1;
    std::vector<Index> j2;
    std::vector<double> rho_pairs;
    std::vector<double> rho_singles;
};

/// rho_{i,j}: maximum over the grid of the sum of two neighbouring values of
/// the averaged normalized periodogram; the final grid point contributes a
/// single term when k+1 falls off the grid.
inline double rho_pair_measure(const Periodogram& a, const Periodogram& b) {
    const Index kmax = a.max_k();
    double best = 0.0;
    for (Index k = 1; k <= kmax; ++k) {
        double s = (a.normalized(k) + b.normalized(k)) / 2.0;
        if (k + 1 <= kmax) s += (a.normalized(k + 1) + b.normalized(k + 1)) / 2.0;
        best = std::max(best, s);
    }
    return best;
}

/// rho_i: the two-point sum at floor(L/2)/L and (floor(L/2)+1)/L with the
/// off-grid second point clamped to the grid end.
inline double rho_single_measure(const Periodogram& a) {
    const Index kmax = a.max_k();
    const Index k1 = a.m / 2;            // floor(L/2), equals kmax
    const Index k2 = std::min(k1 + 1, kmax);
    return a.normalized(k1) + a.normalized(k2);
}

inline FreqScan freq_scan(const std::vector<Periodogram>& pgs, Index s0) {
    FreqScan scan;
    const Index d = static_cast<Index>(pgs.size());
    scan.grid = pgs.front().m;
    scan.argmax_k.reserve(pgs.size());
    for (const auto& pg : pgs) {
        const auto am = argmax_frequency(pg);
        scan.argmax_k.push_back(am.k);
        scan.argmax_theta.push_back(am.theta);
    }
    const double half = static_cast<double>(scan.grid) / 2.0;
    for (Index i = 1; i <= d - 1; ++i) {
        const Index ki = scan.argmax_k[i - 1], kj = scan.argmax_k[i];
        if (ki > 0 && kj > 0 && std::abs(ki - kj) <= s0) {
            scan.j1.emplace_back(i, i + 1);
            scan.rho_pairs.push_back(rho_pair_measure(pgs[i - 1], pgs[i]));
        }
    }
    for (Index i = 1; i <= d; ++i) {
        if (std::abs(static_cast<double>(scan.argmax_k[i - 1]) - half) <= static_cast<double>(s0)) {
            scan.j2.push_back(i);
            scan.rho_singles.push_back(rho_single_measure(pgs[i - 1]));
        }
    }
    return scan;
}

inline void freq_select(const FreqScan& scan, double rho0, GroupingResult& res) {
    for (std::size_t t = 0; t < scan.j1.size(); ++t)
        if (scan.rho_pairs[t] >= rho0) res.pairs.push_back(scan.j1[t]);
    for (std::size_t t = 0; t < scan.j2.size(); ++t)
        if (scan.rho_singles[t] >= rho0) res.singletons.push_back(scan.j2[t]);
}

inline void check_equal_lengths(const std::vector<Vector>& items, const char* who) {
    for (const auto& v : items)
        require(v.size() == items.front().size(), std::string(who) + ": vectors differ in length");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The three 1D identification methods

/// Low-frequency method: J = { i in I : T(Y_i; w1, w2) >= T0 }. Candidates
/// may be eigenvectors, factor vectors or reconstructed series; zero
/// candidates are excluded and flagged.
inline GroupingResult identify_trend(const std::vector<Vector>& items, const TrendIdConfig& cfg) {
    detail::require(!items.empty(), "identify_trend: no candidates");
    detail::require(cfg.omega1 >= 0.0 && cfg.omega1 <= cfg.omega2 && cfg.omega2 <= 0.5,
                    "identify_trend: need 0 <= w1 <= w2 <= 0.5");
    detail::require(cfg.threshold >= 0.0 && cfg.threshold <= 1.0,
                    "identify_trend: threshold must lie in [0, 1]");

    GroupingResult res;
    res.method = IdMethod::Trend;
    res.threshold = cfg.threshold;
    res.candidates = cfg.indices;
    if (res.candidates.empty())
        for (std::size_t t = 0; t < items.size(); ++t)
            res.candidates.push_back(static_cast<Index>(t) + 1);
    detail::require(res.candidates.size() == items.size(),
                    "identify_trend: index set does not match the candidate list");

    for (std::size_t t = 0; t < items.size(); ++t) {
        const Periodogram pg = periodogram_1d(items[t]);
        if (pg.degenerate) {
            res.trend_measure.push_back(0.0);
            res.excluded.push_back(res.candidates[t]);
            continue;
        }
        const double measure = freq_contribution(pg, cfg.omega1, cfg.omega2);
        res.trend_measure.push_back(measure);
        if (measure >= cfg.threshold) res.singletons.push_back(res.candidates[t]);
    }
    return res;
}

/// Frequency method: consecutive pairs with close positive periodogram
/// argmaxes (step 1) are kept when their two-neighbour measure rho reaches
/// rho0 (step 2); singletons near frequency 0.5 are treated likewise.
inline GroupingResult identify_periodic_freq(const std::vector<Vector>& u,
                                             const FreqIdConfig& cfg) {
    detail::require(!u.empty(), "identify_periodic_freq: need at least one vector");
    detail::require(cfg.s0 >= 0, "identify_periodic_freq: s0 must be nonnegative");
    detail::require(cfg.rho0 >= 0.0 && cfg.rho0 <= 1.0,
                    "identify_periodic_freq: rho0 must lie in [0, 1]");
    detail::check_equal_lengths(u, "identify_periodic_freq");

    std::vector<Periodogram> pgs;
    pgs.reserve(u.size());
    for (const auto& v : u) pgs.push_back(periodogram_1d(v));
    const auto scan = detail::freq_scan(pgs, cfg.s0);

    GroupingResult res;
    res.method = IdMethod::Freq;
    res.threshold = cfg.rho0;
    for (std::size_t t = 0; t < u.size(); ++t) res.candidates.push_back(static_cast<Index>(t) + 1);
    res.argmax_k = scan.argmax_k;
    res.argmax_theta = scan.argmax_theta;
    res.j1 = scan.j1;
    res.j2 = scan.j2;
    res.rho_pairs = scan.rho_pairs;
    res.rho_singles = scan.rho_singles;
    detail::freq_select(scan, cfg.rho0, res);
    return res;
}

/// Angle-regularity method: tau-tilde of each consecutive pair, greedy
/// overlap elimination, then either the m smallest surviving pairs (count
/// mode) or all surviving pairs below t0 (threshold mode).
inline GroupingResult identify_periodic_angle(const std::vector<Vector>& u,
                                              const AngleIdConfig& cfg) {
    const Index r = static_cast<Index>(u.size());
    detail::require(r >= 2, "identify_periodic_angle: need at least 2 vectors");
    detail::check_equal_lengths(u, "identify_periodic_angle");
    if (cfg.stop == AngleIdConfig::Stop::Count)
        detail::require(cfg.m >= 0 && 2 * cfg.m <= r, "identify_periodic_angle: need m <= r/2");
    else
        detail::require(cfg.t0 >= 0.0, "identify_periodic_angle: t0 must be nonnegative");

    GroupingResult res;
    res.method = IdMethod::Angle;
    res.threshold = cfg.stop == AngleIdConfig::Stop::Threshold
                        ? cfg.t0
                        : std::numeric_limits<double>::quiet_NaN();
    for (Index i = 1; i <= r; ++i) res.candidates.push_back(i);

    std::vector<double> pair_value(static_cast<std::size_t>(r - 1));
    for (Index j = 1; j <= r - 1; ++j) {
        try {
            pair_value[j - 1] = tau_norm(u[j - 1], u[j]);
        } catch (const DataError&) {
            pair_value[j - 1] = detail::kInf;
            res.excluded.push_back(j);
        }
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

#endif  // SSAKIT_IDENTIFY_HPP
