#ifndef SSAKIT_EXPERIMENTS_HPP
#define SSAKIT_EXPERIMENTS_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "ssakit/identify.hpp"
#include "ssakit/reconstruct.hpp"

namespace ssakit {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Seedable generator with a fixed cross-platform Gaussian transform:
/// mt19937_64 for the raw stream, uniforms from the top 53 bits, and
/// Box-Muller (two uniforms per draw, no caching) for normals. Identical
/// seeds give identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // in (0, 1]; never 0 so logs are safe
        return 1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double gauss() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Deterministic sub-seed derivation (splitmix64), used to partition the
    /// seed space over replications so parallel runs match sequential ones.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t salt) {
        return splitmix(master ^ splitmix(salt));
    }

  private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

/// Parameters of the simulated e-m harmonic plus modulated noise:
///   s_k = a e^{alpha k} cos(2 pi omega k + phi),  n_k = e^{alpha k} sigma eps_k.
struct SignalModel {
    Index n = 0;
    double a = 1.0;
    double alpha = 0.0;
    double omega = 0.25;
    double phi = 0.0;
    double sigma = 0.0;
};

struct Simulated {
    Vector signal;
    Vector noise;
    Vector series;
};

inline Simulated simulate(const SignalModel& model, std::uint64_t seed) {
    detail::require(model.n >= 2, "simulate: need N >= 2");
    detail::require(model.a != 0.0, "simulate: amplitude must be nonzero");
    detail::require(model.omega > 0.0 && model.omega <= 0.5,
                    "simulate: omega must lie in (0, 0.5]");
    detail::require(model.sigma >= 0.0, "simulate: sigma must be nonnegative");

    Rng rng(seed);
    Simulated out;
    out.signal.resize(model.n);
    out.noise.resize(model.n);
    for (Index k = 1; k <= model.n; ++k) {
        const double mod = std::exp(model.alpha * static_cast<double>(k));
        out.signal[k - 1] = model.a * mod *
                            std::cos(2.0 * std::numbers::pi * model.omega * static_cast<double>(k) +
                                     model.phi);
        out.noise[k - 1] = mod * model.sigma * rng.gauss();
    }
    out.series = out.signal + out.noise;
    return out;
}

/// Mean squared difference between two equal-length series.
inline double identification_error(const Vector& a, const Vector& b) {
    detail::require(a.size() == b.size(), "identification_error: lengths differ");
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

/// Signal reconstruction by the two leading eigentriples, the experimental
/// stand-in for identification by eye. When fewer than two components are
/// available the reconstruction uses what there is and sets *flagged.
inline Vector visual_identification(const Vector& x, Index window, bool* flagged = nullptr) {
    const Decomposition dec = decompose(embed_1d(x, window));
    Group group;
    for (Index i = 1; i <= std::min<Index>(2, dec.rank()); ++i) group.push_back(i);
    if (flagged) *flagged = dec.rank() < 2;
    return reconstruct_series(dec, group);
}

enum class HarmonicMethod { Angle, Freq };

/// The threshold grid T = {0, 0.01, ..., 1}.
inline std::vector<double> default_threshold_grid() {
    std::vector<double> grid(101);
    for (int i = 0; i <= 100; ++i) grid[static_cast<std::size_t>(i)] = i / 100.0;
    return grid;
}

namespace detail {

/// Per-realization state for sweeping identification thresholds: the
/// decomposition, the elementary reconstructions, and both method scans are
/// computed once; selecting a group for a given threshold is then cheap.
class HarmonicSweep {
  public:
    HarmonicSweep(const Vector& x, Index window, Index s0)
        : dec_(decompose(embed_1d(x, window))) {
        require_data(dec_.rank() >= 2, "harmonic sweep: fewer than 2 components");
        const Index d = dec_.rank();
        std::vector<Vector> u = dec_.left_vectors(d);
        elementary_.reserve(static_cast<std::size_t>(d));
        for (Index i = 1; i <= d; ++i) elementary_.push_back(reconstruct_series(dec_, {i}));

        std::vector<double> pair_value(static_cast<std::size_t>(d - 1));
        for (Index j = 1; j <= d - 1; ++j) {
            try {
                pair_value[j - 1] = tau_norm(u[j - 1], u[j]);
            } catch (const DataError&) {
                pair_value[j - 1] = kInf;
            }
        }
        angle_ = angle_scan(std::move(pair_value));

        std::vector<Periodogram> pgs;
        pgs.reserve(u.size());
        for (const auto& vec : u) pgs.push_back(periodogram_1d(vec));
        freq_ = freq_scan(pgs, s0);
    }

    std::vector<Index> select(HarmonicMethod method, double threshold) const {
        GroupingResult res;
        if (method == HarmonicMethod::Angle) {
            for (Index j : angle_take(angle_, AngleIdConfig::by_threshold(threshold)))
                res.pairs.emplace_back(j, j + 1);
        } else {
            freq_select(freq_, threshold, res);
        }
        return res.indices();
    }

    Vector reconstruct_group(const std::vector<Index>& group) const {
        Vector out = Vector::Zero(elementary_.empty()
                                      ? std::get<Shape1D>(dec_.shape()).n
                                      : elementary_.front().size());
        for (Index i : group) out += elementary_[static_cast<std::size_t>(i - 1)];
        return out;
    }

    Vector visual() const { return reconstruct_group({1, 2}); }

    /// Smallest grid threshold minimizing the error against `target`.
    std::pair<double, double> fit_threshold(HarmonicMethod method, const Vector& target,
                                            const std::vector<double>& grid) const {
        std::map<std::vector<Index>, double> memo;
        double best_t = grid.front();
        double best_err = std::numeric_limits<double>::infinity();
        for (double t : grid) {
            const auto group = select(method, t);
            auto it = memo.find(group);
            if (it == memo.end())
                it = memo.emplace(group, identification_error(target, reconstruct_group(group)))
                         .first;
            if (it->second < best_err) {
                best_err = it->second;
                best_t = t;
            }
        }
        return {best_t, best_err};
    }

  private:
    Decomposition dec_;
    std::vector<Vector> elementary_;
    AngleScan angle_;
    FreqScan freq_;
};

template <class F>
inline void parallel_for(Index count, int threads, F&& fn) {
    if (threads <= 1) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    const int nt = std::min<int>(threads, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (Index i; (i = next.fetch_add(1)) < count;) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

struct ThresholdFit {
    double threshold = 0.0;
    double error = 0.0;
};

/// Grid threshold minimizing the mean squared error between the automatic
/// reconstruction at that threshold and the visual identification of the
/// same realization; ties resolve to the smallest threshold.
inline ThresholdFit optimal_threshold(const Vector& x, HarmonicMethod method, Index window,
                                      Index s0 = 1,
                                      const std::vector<double>& grid = default_threshold_grid()) {
    detail::require(!grid.empty(), "optimal_threshold: empty grid");
    const detail::HarmonicSweep sweep(x, window, s0);
    const auto [t, err] = sweep.fit_threshold(method, sweep.visual(), grid);
    return {t, err};
}

// ---------------------------------------------------------------------------
// Threshold calibration (95% quantile of tau over simulated noise levels)

struct CalibrationConfig {
    SignalModel model;              ///< sigma is taken from the grid
    Index window = 50;
    std::vector<double> sigma_grid;
    Index n_sim = 1000;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
};

struct CalibrationResult {
    std::vector<double> sigma;
    std::vector<double> q95;
    std::vector<Index> dropped;  ///< degenerate replications per sigma
    double recommended_t0 = 0.0; ///< q95 at the largest sigma <= 1
};

/// Empirical 95% quantile (nearest-rank) of a sample.
inline double quantile95(std::vector<double> values) {
    detail::require(!values.empty(), "quantile95: empty sample");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * n)) - 1;
    return values[idx];
}

inline CalibrationResult calibrate_threshold(const CalibrationConfig& cfg) {
    detail::require(!cfg.sigma_grid.empty(), "calibrate_threshold: empty sigma grid");
    detail::require(cfg.n_sim >= 1, "calibrate_threshold: n_sim must be positive");

    CalibrationResult out;
    out.sigma = cfg.sigma_grid;
    out.q95.resize(cfg.sigma_grid.size());
    out.dropped.assign(cfg.sigma_grid.size(), 0);

    for (std::size_t s = 0; s < cfg.sigma_grid.size(); ++s) {
        SignalModel model = cfg.model;
        model.sigma = cfg.sigma_grid[s];
        std::vector<double> values(static_cast<std::size_t>(cfg.n_sim),
                                   std::numeric_limits<double>::quiet_NaN());
        detail::parallel_for(cfg.n_sim, cfg.threads, [&](Index t) {
            const auto salt = static_cast<std::uint64_t>(s) * 0x100000000ull +
                              static_cast<std::uint64_t>(t);
            const Simulated sim = simulate(model, Rng::derive(cfg.seed, salt));
            try {
                const Decomposition dec = decompose(embed_1d(sim.series, cfg.window));
                if (dec.rank() < 2) return;
                values[static_cast<std::size_t>(t)] = tau(dec.u(1), dec.u(2));
            } catch (const DataError&) {
                // degenerate replication: slot stays NaN and is dropped below
            }
        });
        std::vector<double> kept;
        kept.reserve(values.size());
        for (double v : values)
            if (std::isnan(v))
                ++out.dropped[s];
            else
                kept.push_back(v);
        detail::require_data(!kept.empty(), "calibrate_threshold: all replications degenerate");
        out.q95[s] = quantile95(std::move(kept));
    }

    // recommended threshold: quantile at the largest calibrated sigma <= 1
    std::size_t pick = 0;
    bool found = false;
    for (std::size_t s = 0; s < out.sigma.size(); ++s)
        if (out.sigma[s] <= 1.0 && (!found || out.sigma[s] >= out.sigma[pick])) {
            pick = s;
            found = true;
        }
    out.recommended_t0 = out.q95[pick];
    return out;
}

// ---------------------------------------------------------------------------
// Comparison of the angle and frequency methods (the Tables 1-2 protocol)

struct ComparisonConfig {
    SignalModel model;              ///< sigma is taken from the grid
    Index window = 50;
    std::vector<double> sigma_grid;
    Index n_rep = 200;
    std::uint64_t seed = kDefaultSeed;
    Index s0 = 1;
    int threads = 1;
    std::vector<double> threshold_grid = default_threshold_grid();
};

/// One replication pair: thresholds fitted on the first realization and
/// errors of both methods on the second.
struct RepRecord {
    double t_opt = 0.0;
    double rho_opt = 0.0;
    double e_tau = 0.0;
    double e_rho = 0.0;
    bool ok = false;
};

struct ComparisonRow {
    double sigma = 0.0;
    double mean_tau = 0.0;
    double mean_rho = 0.0;
    double median_tau = 0.0;
    double median_rho = 0.0;
    Index excluded = 0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    std::vector<std::vector<RepRecord>> reps;  ///< per sigma, per replication
    ComparisonConfig config;
};

inline double median(std::vector<double> values) {
    detail::require(!values.empty(), "median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// For each sigma: fit t0/rho0 on one realization against its visual
/// identification, apply them to an independent second realization, and
/// aggregate the identification errors over n_rep replications.
inline ComparisonReport compare_methods(const ComparisonConfig& cfg) {
    detail::require(!cfg.sigma_grid.empty(), "compare_methods: empty sigma grid");
    detail::require(cfg.n_rep >= 1, "compare_methods: n_rep must be positive");
    detail::require(!cfg.threshold_grid.empty(), "compare_methods: empty threshold grid");

    ComparisonReport report;
    report.config = cfg;
    for (std::size_t s = 0; s < cfg.sigma_grid.size(); ++s) {
        SignalModel model = cfg.model;
        model.sigma = cfg.sigma_grid[s];
        std::vector<RepRecord> recs(static_cast<std::size_t>(cfg.n_rep));
        detail::parallel_for(cfg.n_rep, cfg.threads, [&](Index t) {
            const auto base = (static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(cfg.n_rep) +
                               static_cast<std::uint64_t>(t)) * 2ull;
            RepRecord rec;
            try {
                const Simulated x1 = simulate(model, Rng::derive(cfg.seed, base));
                const Simulated x2 = simulate(model, Rng::derive(cfg.seed, base + 1));
                const detail::HarmonicSweep sweep1(x1.series, cfg.window, cfg.s0);
                const detail::HarmonicSweep sweep2(x2.series, cfg.window, cfg.s0);
                const Vector visual1 = sweep1.visual();
                const Vector visual2 = sweep2.visual();
                rec.t_opt =
                    sweep1.fit_threshold(HarmonicMethod::Angle, visual1, cfg.threshold_grid).first;
                rec.rho_opt =
                    sweep1.fit_threshold(HarmonicMethod::Freq, visual1, cfg.threshold_grid).first;
                rec.e_tau = identification_error(
                    visual2, sweep2.reconstruct_group(sweep2.select(HarmonicMethod::Angle, rec.t_opt)));
                rec.e_rho = identification_error(
                    visual2, sweep2.reconstruct_group(sweep2.select(HarmonicMethod::Freq, rec.rho_opt)));
                rec.ok = true;
            } catch (const DataError&) {
                rec.ok = false;
            }
            recs[static_cast<std::size_t>(t)] = rec;
        });

        ComparisonRow row;
        row.sigma = cfg.sigma_grid[s];
        std::vector<double> e_tau, e_rho;
        for (const auto& rec : recs) {
            if (!rec.ok) {
                ++row.excluded;
                continue;
            }
            e_tau.push_back(rec.e_tau);
            e_rho.push_back(rec.e_rho);
        }
        detail::require_data(!e_tau.empty(), "compare_methods: all replications degenerate");
        row.mean_tau = std::accumulate(e_tau.begin(), e_tau.end(), 0.0) /
                       static_cast<double>(e_tau.size());
        row.mean_rho = std::accumulate(e_rho.begin(), e_rho.end(), 0.0) /
                       static_cast<double>(e_rho.size());
        row.median_tau = median(e_tau);
        row.median_rho = median(e_rho);
        report.rows.push_back(row);
        report.reps.push_back(std::move(recs));
    }
    return report;
}

}  // namespace ssakit

#endif  // SSAKIT_EXPERIMENTS_HPP
