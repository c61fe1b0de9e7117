#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ssakit/identify_mssa.hpp"

using namespace ssakit;

namespace {

/// Two-channel e-m harmonic with common omega and per-channel amplitude/phase.
MultiSeries two_channel_harmonic(Index n1, Index n2, double omega, double a, double b,
                                 double phi1, double phi2, double alpha = 0.0) {
    return MultiSeries{{oracles::em_harmonic(n1, a, alpha, omega, phi1),
                        oracles::em_harmonic(n2, b, alpha, omega, phi2)}};
}

std::vector<FactorVectorParts> right_parts(const Decomposition& dec, Index count = -1) {
    if (count < 0) count = dec.rank();
    std::vector<FactorVectorParts> out;
    for (Index i = 1; i <= count; ++i) out.push_back(factor_parts(dec, i));
    return out;
}

std::vector<FactorVectorParts> random_parts(Index count, const std::vector<Index>& k_list,
                                            unsigned seed) {
    Index total = 0;
    for (Index k : k_list) total += k;
    std::vector<FactorVectorParts> out;
    for (Index i = 0; i < count; ++i) {
        Vector v = oracles::random_vector(total, seed + 31 * static_cast<unsigned>(i));
        v /= v.norm();
        out.push_back(split_factor_vector(v, k_list));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// s = 1 reduction: every MSSA variant must reproduce the 1D method bit for bit

TEST(MssaReduction, TrendRightEqualsOneD) {
    const auto dec = decompose(embed_1d(oracles::random_vector(60, 5), 20));
    const auto v = dec.right_vectors(dec.rank());
    std::vector<FactorVectorParts> parts;
    for (const auto& vec : v) parts.push_back(split_factor_vector(vec, {vec.size()}));
    TrendIdConfig cfg;
    cfg.omega2 = 0.12;
    cfg.threshold = 0.4;
    const auto a = identify_trend(v, cfg);
    const auto b = identify_trend_mssa_right(parts, cfg);
    EXPECT_EQ(a.singletons, b.singletons);
    EXPECT_EQ(a.trend_measure, b.trend_measure);
}

TEST(MssaReduction, FreqRightEqualsOneD) {
    const Vector x = oracles::random_vector(60, 6);
    const auto dec1 = decompose(embed_1d(x, 20));
    const auto decm = decompose(embed_mssa(MultiSeries{{x}}, 20));
    const FreqIdConfig cfg{.s0 = 1, .rho0 = 0.5};
    const auto a = identify_periodic_freq(dec1.right_vectors(dec1.rank()), cfg);
    const auto b = identify_periodic_freq_mssa_right(right_parts(decm), cfg);
    EXPECT_EQ(a.pairs, b.pairs);
    EXPECT_EQ(a.singletons, b.singletons);
    EXPECT_EQ(a.j1, b.j1);
    EXPECT_EQ(a.j2, b.j2);
    EXPECT_EQ(a.rho_pairs, b.rho_pairs);
    EXPECT_EQ(a.rho_singles, b.rho_singles);
}

TEST(MssaReduction, AngleRightEqualsOneD) {
    const Vector x = oracles::random_vector(60, 7);
    const auto dec1 = decompose(embed_1d(x, 20));
    const auto decm = decompose(embed_mssa(MultiSeries{{x}}, 20));
    const auto cfg = AngleIdConfig::by_threshold(0.5);
    const auto a = identify_periodic_angle(dec1.right_vectors(dec1.rank()), cfg);
    const auto b = identify_periodic_angle_mssa_right(right_parts(decm), cfg);
    EXPECT_EQ(a.pairs, b.pairs);
    EXPECT_EQ(a.tau_pairs, b.tau_pairs);
    EXPECT_EQ(a.surviving, b.surviving);
}

TEST(MssaReduction, LeftVariantsDelegate) {
    const auto dec = decompose(embed_1d(oracles::random_vector(50, 8), 18));
    const auto u = dec.left_vectors(dec.rank());
    TrendIdConfig tcfg;
    tcfg.omega2 = 0.1;
    tcfg.threshold = 0.3;
    EXPECT_EQ(identify_trend_mssa_left(u, tcfg).singletons, identify_trend(u, tcfg).singletons);
    const FreqIdConfig fcfg{.s0 = 1, .rho0 = 0.4};
    EXPECT_EQ(identify_periodic_freq_mssa_left(u, fcfg).pairs,
              identify_periodic_freq(u, fcfg).pairs);
    const auto acfg = AngleIdConfig::by_threshold(0.2);
    EXPECT_EQ(identify_periodic_angle_mssa_left(u, acfg).pairs,
              identify_periodic_angle(u, acfg).pairs);
}

// ---------------------------------------------------------------------------
// MSSA harmonic oracle: common harmonic identified by every pipeline

TEST(MssaHarmonic, LeftPipelinesIdentifyThePair) {
    const auto ms = two_channel_harmonic(99, 99, 0.2, 1.0, 2.0, 0.3, 1.4);
    const auto dec = decompose(embed_mssa(ms, 50));
    ASSERT_EQ(dec.rank(), 2);
    const auto u = dec.left_vectors(2);

    const auto freq = identify_periodic_freq_mssa_left(u, {.s0 = 1, .rho0 = 0.9});
    EXPECT_EQ(freq.pairs, (std::vector<IndexPair>{{1, 2}}));

    const auto angle = identify_periodic_angle_mssa_left(u, AngleIdConfig::by_count(1));
    EXPECT_EQ(angle.pairs, (std::vector<IndexPair>{{1, 2}}));
}

TEST(MssaHarmonic, RightPipelinesIdentifyThePair) {
    // distinct phases per channel; K_p * omega integer keeps the parts exact
    const auto ms = two_channel_harmonic(99, 99, 0.2, 1.0, 2.0, 0.7, 2.1);
    const auto dec = decompose(embed_mssa(ms, 50));
    const auto v = right_parts(dec);

    const auto freq = identify_periodic_freq_mssa_right(v, {.s0 = 1, .rho0 = 0.9});
    EXPECT_EQ(freq.pairs, (std::vector<IndexPair>{{1, 2}}));

    const auto angle = identify_periodic_angle_mssa_right(v, AngleIdConfig::by_count(1));
    EXPECT_EQ(angle.pairs, (std::vector<IndexPair>{{1, 2}}));
}

// ---------------------------------------------------------------------------
// Trend variants

TEST(MssaTrend, LeftIdentifiesCommonExponential) {
    Vector c1(99), c2(99);
    for (Index n = 1; n <= 99; ++n) {
        c1[n - 1] = std::exp(0.01 * static_cast<double>(n));
        c2[n - 1] = 0.5 * std::exp(0.01 * static_cast<double>(n));
    }
    const auto dec = decompose(embed_mssa(MultiSeries{{c1, c2}}, 50));
    TrendIdConfig cfg;
    cfg.omega2 = 0.05;
    cfg.threshold = 0.9;
    const auto res = identify_trend_mssa_left(dec.left_vectors(1), cfg);
    EXPECT_EQ(res.singletons, (std::vector<Index>{1}));
}

TEST(MssaTrend, RightMaxFindsTrendInSecondChannel) {
    // harmonic in channel 1, constant trend only in channel 2; the exact-grid
    // cosine is orthogonal to the constant so the components separate cleanly
    // and the trend component's channel-1 part is degenerate
    const MultiSeries ms{{oracles::em_harmonic(99, 1.0, 0.0, 0.2), Vector::Constant(99, 2.0)}};
    const auto dec = decompose(embed_mssa(ms, 50));
    ASSERT_EQ(dec.rank(), 3);
    TrendIdConfig cfg;
    cfg.omega2 = 0.05;
    cfg.threshold = 0.9;
    const auto res = identify_trend_mssa_right(right_parts(dec), cfg);
    ASSERT_EQ(res.singletons, (std::vector<Index>{1}));  // constant dominates, lambda = 4*L*K/4
    const auto parts = factor_parts(dec, 1);
    EXPECT_TRUE(parts.degenerate[0]);   // no harmonic leakage into the part
    EXPECT_FALSE(parts.degenerate[1]);
}

TEST(MssaTrend, PureHarmonicExcludedEverywhere) {
    const auto ms = two_channel_harmonic(99, 89, 0.2, 1.0, 1.5, 0.0, 0.9);
    const auto dec = decompose(embed_mssa(ms, 40));
    TrendIdConfig cfg;
    cfg.omega2 = 0.05;
    cfg.threshold = 0.9;
    EXPECT_TRUE(identify_trend_mssa_right(right_parts(dec), cfg).singletons.empty());
    EXPECT_TRUE(identify_trend_mssa_left(dec.left_vectors(dec.rank()), cfg).singletons.empty());
}

TEST(MssaTrend, ElementarySeriesInputWorks) {
    Vector c1(80), c2(80);
    for (Index n = 1; n <= 80; ++n) {
        c1[n - 1] = std::exp(0.012 * static_cast<double>(n));
        c2[n - 1] = 1.0 + 0.01 * static_cast<double>(n);
    }
    const auto dec = decompose(embed_mssa(MultiSeries{{c1, c2}}, 30));
    std::vector<MultiSeries> elem;
    for (Index i = 1; i <= dec.rank(); ++i)
        elem.push_back(std::get<MultiSeries>(elementary_component(dec, i)));
    TrendIdConfig cfg;
    cfg.omega2 = 0.05;
    cfg.threshold = 0.9;
    const auto res = identify_trend_mssa_right(elem, cfg);
    EXPECT_FALSE(res.singletons.empty());
    EXPECT_EQ(res.singletons[0], 1);
}

TEST(MssaTrend, ZeroThresholdKeepsAll) {
    const auto v = random_parts(4, {12, 9}, 3);
    TrendIdConfig cfg;
    cfg.omega2 = 0.2;
    cfg.threshold = 0.0;
    EXPECT_EQ(identify_trend_mssa_right(v, cfg).singletons.size(), 4u);
}

// ---------------------------------------------------------------------------
// Frequency method, right variant specifics

TEST(MssaFreq, HarmonicInOneChannelOnly) {
    // constant channel (component 1) and a harmonic living only in channel 1
    // (components 2, 3); the harmonic pair must be admitted through channel 1
    const MultiSeries ms{{oracles::em_harmonic(99, 1.0, 0.0, 0.2), Vector::Constant(99, 2.0)}};
    const auto dec = decompose(embed_mssa(ms, 50));
    ASSERT_EQ(dec.rank(), 3);
    const auto res = identify_periodic_freq_mssa_right(right_parts(dec), {.s0 = 1, .rho0 = 0.9});
    EXPECT_EQ(res.pairs, (std::vector<IndexPair>{{2, 3}}));
    EXPECT_TRUE(res.singletons.empty());
}

TEST(MssaFreq, HalfFrequencyInBothChannels) {
    Vector c1(31), c2(31);
    for (Index n = 1; n <= 31; ++n) {
        c1[n - 1] = (n % 2 == 0) ? 1.0 : -1.0;
        c2[n - 1] = (n % 2 == 0) ? -0.5 : 0.5;
    }
    const auto dec = decompose(embed_mssa(MultiSeries{{c1, c2}}, 10));  // K_p = 22, even
    ASSERT_EQ(dec.rank(), 1);
    const auto res = identify_periodic_freq_mssa_right(right_parts(dec), {.s0 = 1, .rho0 = 0.9});
    EXPECT_EQ(res.j2, (std::vector<Index>{1}));
    EXPECT_EQ(res.singletons, (std::vector<Index>{1}));
}

TEST(MssaFreq, GaussianNullMostlyEmpty) {
    int empty = 0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        const auto v = random_parts(8, {40, 35}, 1000 + seed);
        if (identify_periodic_freq_mssa_right(v, {.s0 = 1, .rho0 = 0.9}).indices().empty())
            ++empty;
    }
    EXPECT_GE(empty, 99);
}

// ---------------------------------------------------------------------------
// Aggregation semantics

TEST(MssaAggregation, BoundsOnRandomInputs) {
    const std::vector<Index> k_list{20, 16};
    const auto v = random_parts(6, k_list, 17);

    TrendIdConfig tcfg;
    tcfg.omega2 = 0.2;
    tcfg.threshold = 0.0;
    const auto trend = identify_trend_mssa_right(v, tcfg);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (Index p = 0; p < 2; ++p) {
            const double part_t = freq_contribution(v[i].parts[static_cast<std::size_t>(p)],
                                                    tcfg.omega1, tcfg.omega2);
            EXPECT_GE(trend.trend_measure[i] + 1e-15, part_t);
        }

    const auto freq = identify_periodic_freq_mssa_right(v, {.s0 = 50, .rho0 = 0.0});
    for (std::size_t t = 0; t < freq.j1.size(); ++t) {
        const auto [i, j] = freq.j1[t];
        for (Index p = 0; p < 2; ++p) {
            const auto sp = static_cast<std::size_t>(p);
            const auto pa = periodogram_1d(v[static_cast<std::size_t>(i - 1)].normalized[sp]);
            const auto pb = periodogram_1d(v[static_cast<std::size_t>(j - 1)].normalized[sp]);
            EXPECT_GE(freq.rho_pairs[t] + 1e-15, detail::rho_pair_measure(pa, pb));
        }
    }

    const auto angle = identify_periodic_angle_mssa_right(v, AngleIdConfig::by_threshold(1e9));
    for (std::size_t j = 0; j + 1 < v.size(); ++j)
        for (Index p = 0; p < 2; ++p) {
            const auto sp = static_cast<std::size_t>(p);
            const double per_channel = tau_norm(v[j].parts[sp], v[j + 1].parts[sp]);
            EXPECT_LE(angle.tau_pairs[j], per_channel + 1e-15);
        }
}

TEST(MssaAggregation, ChannelPermutationInvariant) {
    const auto v = random_parts(5, {18, 14}, 23);
    std::vector<FactorVectorParts> swapped = v;
    for (auto& fv : swapped) {
        std::swap(fv.parts[0], fv.parts[1]);
        std::swap(fv.normalized[0], fv.normalized[1]);
        std::swap(fv.norms[0], fv.norms[1]);
        // std::vector<bool> proxies do not std::swap; go through temporaries
        const bool d0 = fv.degenerate[0];
        fv.degenerate[0] = fv.degenerate[1];
        fv.degenerate[1] = d0;
    }
    const FreqIdConfig fcfg{.s0 = 2, .rho0 = 0.1};
    const auto a = identify_periodic_freq_mssa_right(v, fcfg);
    const auto b = identify_periodic_freq_mssa_right(swapped, fcfg);
    EXPECT_EQ(a.pairs, b.pairs);
    EXPECT_EQ(a.singletons, b.singletons);
    EXPECT_EQ(a.rho_pairs, b.rho_pairs);

    const auto acfg = AngleIdConfig::by_threshold(2.0);
    EXPECT_EQ(identify_periodic_angle_mssa_right(v, acfg).tau_pairs,
              identify_periodic_angle_mssa_right(swapped, acfg).tau_pairs);
}

TEST(MssaAngle, MinTakesTheHarmonicChannel) {
    // harmonic only in channel 2: the pair's channel-1 parts are degenerate
    // (skipped) and the min aggregation picks the harmonic channel
    const MultiSeries ms{{Vector::Constant(99, 2.0), oracles::em_harmonic(99, 1.0, 0.0, 0.2)}};
    const auto dec = decompose(embed_mssa(ms, 50));
    ASSERT_EQ(dec.rank(), 3);
    const auto v = right_parts(dec);
    ASSERT_TRUE(v[1].degenerate[0]);  // harmonic component has no channel-1 mass
    const auto res = identify_periodic_angle_mssa_right(v, AngleIdConfig::by_count(1));
    EXPECT_EQ(res.pairs, (std::vector<IndexPair>{{2, 3}}));
    EXPECT_LT(res.tau_pairs[1], 1e-10);
}

TEST(MssaValidation, MismatchedChannelCountsRejected) {
    auto v = random_parts(3, {10, 8}, 9);
    v[1] = split_factor_vector(Vector::Ones(10), {10});
    EXPECT_THROW(identify_periodic_freq_mssa_right(v, {.s0 = 1, .rho0 = 0.5}), ParameterError);
    EXPECT_THROW(identify_periodic_angle_mssa_right(v, AngleIdConfig::by_threshold(1.0)),
                 ParameterError);
}
