#ifndef SSAKIT_SPECTRAL_HPP
#define SSAKIT_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ssakit/common.hpp"

namespace ssakit {

namespace detail {

/// Direct DFT sums cos/sin(2*pi*n*k/M) with the angle reduced through the
/// exact integer residue (n*k) mod M, so exact-grid harmonics come out clean.
inline std::complex<double> dft_bin(const Vector& y, Index k) {
    const Index m = y.size();
    double re = 0.0, im = 0.0;
    for (Index n = 1; n <= m; ++n) {
        const double ang =
            2.0 * std::numbers::pi * static_cast<double>((n * k) % m) / static_cast<double>(m);
        re += y[n - 1] * std::cos(ang);
        im -= y[n - 1] * std::sin(ang);
    }
    return {re, im};
}

}  // namespace detail

/// Discrete periodogram of a real series on the grid k/M, k = 0..floor(M/2).
/// Powers sum exactly to ||Y||^2 (Parseval); the normalized form sums to 1.
/// A zero series is flagged degenerate and keeps all-zero powers.
struct Periodogram {
    Index m = 0;
    Vector power;
    double norm2 = 0.0;
    bool degenerate = true;

    Index grid_size() const { return power.size(); }
    Index max_k() const { return power.size() - 1; }
    double freq(Index k) const { return static_cast<double>(k) / static_cast<double>(m); }
    double normalized(Index k) const { return degenerate ? 0.0 : power[k] / norm2; }
};

inline Periodogram periodogram_1d(const Vector& y) {
    const Index m = y.size();
    detail::require(m >= 2, "periodogram_1d: need at least 2 samples");
    detail::require_data(detail::all_finite(y), "periodogram_1d: non-finite values");

    Periodogram pg;
    pg.m = m;
    pg.norm2 = y.squaredNorm();
    pg.degenerate = pg.norm2 == 0.0;
    pg.power = Vector::Zero(m / 2 + 1);
    if (pg.degenerate) return pg;

    const double md = static_cast<double>(m);
    for (Index k = 0; k <= m / 2; ++k) {
        const auto bin = detail::dft_bin(y, k);
        if (k == 0) {
            const double c0 = bin.real() / md;
            pg.power[k] = md * c0 * c0;
        } else if (2 * k == m) {
            const double ch = bin.real() / md;  // cos(pi*n) basis has norm^2 = M
            pg.power[k] = md * ch * ch;
        } else {
            const double ck = 2.0 * bin.real() / md;
            const double sk = -2.0 * bin.imag() / md;
            pg.power[k] = md / 2.0 * (ck * ck + sk * sk);
        }
    }
    return pg;
}

/// Share of normalized periodogram mass in the half-open bin [w1, w2).
/// Values of w2 above the grid end simply cover the whole grid; a zero
/// series contributes 0.
inline double freq_contribution(const Periodogram& pg, double w1, double w2) {
    detail::require(w1 >= 0.0 && w2 >= w1 && w2 <= 1.0,
                    "freq_contribution: need 0 <= w1 <= w2 <= 1");
    if (pg.degenerate) return 0.0;
    double t = 0.0;
    for (Index k = 0; k <= pg.max_k(); ++k) {
        const double f = pg.freq(k);
        if (f >= w1 && f < w2) t += pg.normalized(k);
    }
    return t;
}

inline double freq_contribution(const Vector& y, double w1, double w2) {
    return freq_contribution(periodogram_1d(y), w1, w2);
}

struct ArgmaxFreq {
    Index k = 0;      ///< grid index of the maximum, 0 < k <= floor(M/2)
    double theta = 0; ///< k/M
    double value = 0; ///< normalized periodogram value at the maximum
};

/// Argument of the periodogram maximum over 0 < k <= M/2, ties resolved to
/// the smallest k. The k = 0 bin is excluded by definition. Bins at
/// numerical-noise level (below 1e-13 of the total mass) compare as zero so
/// that analytically flat spectra tie deterministically.
inline ArgmaxFreq argmax_frequency(const Periodogram& pg) {
    detail::require_data(!pg.degenerate, "argmax_frequency: zero series");
    ArgmaxFreq best;
    double best_cmp = 0.0;
    for (Index k = 1; k <= pg.max_k(); ++k) {
        const double v = pg.normalized(k);
        const double cmp = v < 1e-13 ? 0.0 : v;
        if (best.k == 0 || cmp > best_cmp) {
            best.k = k;
            best.value = v;
            best_cmp = cmp;
        }
    }
    best.theta = pg.freq(best.k);
    return best;
}

inline ArgmaxFreq argmax_frequency(const Vector& y) {
    return argmax_frequency(periodogram_1d(y));
}

/// Mean of the normalized periodograms of a set of vectors at grid index k.
inline double rho_mean(const std::vector<Periodogram>& set, Index k) {
    detail::require(!set.empty(), "rho_mean: empty set");
    double s = 0.0;
    for (const auto& pg : set) {
        detail::require(k >= 0 && k <= pg.max_k(), "rho_mean: grid index out of range");
        s += pg.normalized(k);
    }
    return s / static_cast<double>(set.size());
}

inline double rho_mean(const std::vector<Vector>& set, Index k) {
    std::vector<Periodogram> pgs;
    pgs.reserve(set.size());
    for (const auto& y : set) pgs.push_back(periodogram_1d(y));
    return rho_mean(pgs, k);
}

/// 2D periodogram on the folded quarter-grid (k/Mx, l/My), k <= Mx/2,
/// l <= My/2. Power is Mx*My*|G_kl|^2 accumulated over the full DFT grid
/// (conjugate cells fold onto the quarter-grid), so the normalized form sums
/// to 1 for a nonzero field.
struct Periodogram2D {
    Index mx = 0, my = 0;
    Matrix power;
    double norm2 = 0.0;
    bool degenerate = true;

    double freq_x(Index k) const { return static_cast<double>(k) / static_cast<double>(mx); }
    double freq_y(Index l) const { return static_cast<double>(l) / static_cast<double>(my); }
    double normalized(Index k, Index l) const { return degenerate ? 0.0 : power(k, l) / norm2; }
};

inline Periodogram2D periodogram_2d(const Matrix& f) {
    const Index mx = f.rows(), my = f.cols();
    detail::require(mx >= 2 && my >= 2, "periodogram_2d: field must be at least 2x2");
    detail::require_data(detail::all_finite(f), "periodogram_2d: non-finite values");

    Periodogram2D pg;
    pg.mx = mx;
    pg.my = my;
    pg.norm2 = f.squaredNorm();
    pg.degenerate = pg.norm2 == 0.0;
    pg.power = Matrix::Zero(mx / 2 + 1, my / 2 + 1);
    if (pg.degenerate) return pg;

    // Separable direct DFT: first along columns (x), then along rows (y).
    Eigen::MatrixXcd stage(mx, my);
    for (Index c = 0; c < my; ++c) {
        const Vector col = f.col(c);
        for (Index k = 0; k < mx; ++k) stage(k, c) = detail::dft_bin(col, k);
    }
    const double scale = static_cast<double>(mx) * static_cast<double>(my);
    for (Index k = 0; k < mx; ++k)
        for (Index l = 0; l < my; ++l) {
            std::complex<double> g{0.0, 0.0};
            for (Index c = 0; c < my; ++c) {
                const double ang = 2.0 * std::numbers::pi *
                                   static_cast<double>(((c + 1) * l) % my) /
                                   static_cast<double>(my);
                g += stage(k, c) * std::complex<double>(std::cos(ang), -std::sin(ang));
            }
            g /= scale;
            pg.power(std::min(k, mx - k), std::min(l, my - l)) += scale * std::norm(g);
        }
    return pg;
}

/// Contribution of the closed frequency rectangle [0, w1] x [0, w2].
inline double freq_contribution_2d(const Periodogram2D& pg, double w1, double w2) {
    detail::require(w1 >= 0.0 && w1 <= 0.5 && w2 >= 0.0 && w2 <= 0.5,
                    "freq_contribution_2d: bounds must lie in [0, 0.5]");
    if (pg.degenerate) return 0.0;
    double t = 0.0;
    for (Index k = 0; k < pg.power.rows(); ++k) {
        if (pg.freq_x(k) > w1) continue;
        for (Index l = 0; l < pg.power.cols(); ++l)
            if (pg.freq_y(l) <= w2) t += pg.normalized(k, l);
    }
    return t;
}

inline double freq_contribution_2d(const Matrix& f, double w1, double w2) {
    return freq_contribution_2d(periodogram_2d(f), w1, w2);
}

}  // namespace ssakit

#endif  // SSAKIT_SPECTRAL_HPP
