#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "richstate/core/error.hpp"
#include "richstate/experiments/stats.hpp"

using namespace richstate;

namespace {

// Brute force over every sign assignment of the observed |differences|.
double enumeration_oracle(const std::vector<double>& x, const std::vector<double>& y, Sidedness side) {
    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != y[i]) d.push_back(x[i] - y[i]);
    }
    if (d.empty()) return 1.0;
    const std::size_t m = d.size();
    std::vector<double> ranks(m);
    for (std::size_t i = 0; i < m; ++i) {
        double less = 0, equal = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (std::fabs(d[j]) < std::fabs(d[i])) ++less;
            if (std::fabs(d[j]) == std::fabs(d[i])) ++equal;
        }
        ranks[i] = less + (equal + 1) / 2.0;
    }
    double observed = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (d[i] > 0) observed += ranks[i];
    }
    double lo = 0, hi = 0;
    const std::uint64_t n = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < n; ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask >> i & 1) w += ranks[i];
        }
        if (w <= observed + 1e-9) ++lo;
        if (w >= observed - 1e-9) ++hi;
    }
    lo /= static_cast<double>(n);
    hi /= static_cast<double>(n);
    if (side == Sidedness::greater) return hi;
    if (side == Sidedness::less) return lo;
    return std::min(1.0, 2 * std::min(lo, hi));
}

}  // namespace

TEST(IncreasePct, ReproducesEndpointTable) {
    EXPECT_EQ(increase_pct(451, 662), 47);
    EXPECT_EQ(increase_pct(244, 424), 74);
    EXPECT_EQ(increase_pct(124, 158), 27);
    EXPECT_EQ(increase_pct(104, 132), 27);
    EXPECT_EQ(increase_pct(204, 342), 68);
}

TEST(IncreasePct, ReproducesProbeTable) {
    EXPECT_EQ(increase_pct(1270, 1657), 30);
    EXPECT_EQ(increase_pct(697, 1040), 49);
    EXPECT_EQ(increase_pct(584, 670), 15);
    EXPECT_EQ(increase_pct(398, 475), 19);
    EXPECT_EQ(increase_pct(477, 736), 54);
}

TEST(IncreasePct, ReproducesCrashTable) {
    EXPECT_EQ(increase_pct(21, 80), 281);
    EXPECT_EQ(increase_pct(260, 560), 115);
}

TEST(IncreasePct, RoundsHalvesAwayFromZero) {
    // 76 / 47 = 161.70...
    EXPECT_EQ(increase_pct(47, 123), 162);
    EXPECT_EQ(increase_pct(8, 9), 13);    // 12.5
    EXPECT_EQ(increase_pct(8, 7), -13);   // -12.5
    EXPECT_EQ(increase_pct(10, 10), 0);
    EXPECT_EQ(increase_pct(5, 0), -100);
}

TEST(IncreasePct, ZeroBaselineIsUndefined) {
    try {
        increase_pct(0, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::undefined_increase);
    }
}

TEST(Venn, FromTotals) {
    EXPECT_EQ(venn_from_totals(451, 662, 28), (VennCounts{28, 423, 239}));
    EXPECT_EQ(venn_from_totals(3, 3, 0), (VennCounts{0, 3, 0}));
    EXPECT_THROW(venn_from_totals(3, 1, 0), Error);
    EXPECT_THROW(venn_from_totals(3, 5, 4), Error);
}

TEST(Venn, PartitionOfSets) {
    std::set<std::string> a{"x", "y", "z"}, b{"y", "z", "w", "v"};
    const auto v = venn_partition(a, b);
    EXPECT_EQ(v, (VennCounts{1, 2, 2}));
    EXPECT_EQ(v.only_a + v.both, a.size());
    EXPECT_EQ(v.only_b + v.both, b.size());
}

TEST(Wilcoxon, AllPositiveTenPairs) {
    std::vector<double> x, y;
    for (int i = 1; i <= 10; ++i) {
        x.push_back(i + 100);
        y.push_back(i * 0.5);
    }
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(x, y), 2.0 / 1024.0);
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(x, y, Sidedness::greater), 1.0 / 1024.0);
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(x, y, Sidedness::less), 1.0);
}

TEST(Wilcoxon, FiveDiffsWithOneNegative) {
    const std::vector<double> x{1, 2, 3, 4, -5}, y(5, 0.0);
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(x, y), 0.625);
}

TEST(Wilcoxon, ZerosAreDroppedAndAllZeroGivesOne) {
    const std::vector<double> x{3, 3, 3}, y{3, 3, 3};
    EXPECT_EQ(wilcoxon_signed_rank(x, y), 1.0);
    const std::vector<double> a{1, 2, 3, 4, -5, 7, 7}, b{0, 0, 0, 0, 0, 7, 7};
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(a, b), 0.625);
}

TEST(Wilcoxon, RejectsBadInput) {
    const std::vector<double> x{1, 2}, y{1};
    EXPECT_THROW(wilcoxon_signed_rank(x, y), Error);
    EXPECT_THROW(wilcoxon_signed_rank(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Wilcoxon, MatchesEnumerationOracleOnRandomSamples) {
    std::mt19937_64 gen(20240611);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + gen() % 12;
        // small integer ranges force ties and zeros
        const int range = 1 + static_cast<int>(gen() % 6);
        std::uniform_int_distribution<int> dist(0, range);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = dist(gen);
            y[i] = dist(gen);
        }
        for (auto side : {Sidedness::two_sided, Sidedness::greater, Sidedness::less}) {
            ASSERT_NEAR(wilcoxon_signed_rank(x, y, side), enumeration_oracle(x, y, side), 1e-12)
                << "trial " << trial;
        }
    }
}

TEST(Wilcoxon, NormalApproximationAboveExactLimit) {
    std::vector<double> x(30), y(30, 0.0);
    for (int i = 0; i < 30; ++i) x[i] = i + 1;
    const double p = wilcoxon_signed_rank(x, y);
    // W+ = 465, mean 232.5, sd sqrt(30*31*61/24)
    const double z = (465 - 232.5 - 0.5) / std::sqrt(30.0 * 31 * 61 / 24);
    EXPECT_NEAR(p, std::erfc(z / std::sqrt(2.0)), 1e-15);
    EXPECT_LT(p, 1e-5);
}

TEST(A12, DominantIdenticalAndAntisymmetric) {
    const std::vector<double> hi{5, 6, 7}, lo{1, 2, 3};
    EXPECT_EQ(vargha_delaney_a12(hi, lo), 1.0);
    EXPECT_EQ(vargha_delaney_a12(lo, hi), 0.0);
    EXPECT_EQ(vargha_delaney_a12(hi, hi), 0.5);
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::uniform_int_distribution<int> dist(0, 5);
        std::vector<double> a(1 + gen() % 10), b(1 + gen() % 10);
        for (auto& v : a) v = dist(gen);
        for (auto& v : b) v = dist(gen);
        ASSERT_DOUBLE_EQ(vargha_delaney_a12(a, b) + vargha_delaney_a12(b, a), 1.0);
    }
    EXPECT_THROW(vargha_delaney_a12(std::vector<double>{}, hi), Error);
}

TEST(Growth, CumulativeUniqueAndReplicateMean) {
    std::vector<std::set<std::string>> r1{{"a"}, {"a", "b"}, {"c"}};
    std::vector<std::set<std::string>> r2{{"x", "y"}};
    EXPECT_EQ(cumulative_unique(r1), (std::vector<std::size_t>{1, 2, 3}));
    std::vector<std::vector<std::set<std::string>>> reps{r1, r2};
    // r2 holds its final value
    EXPECT_EQ(coverage_growth_curve(reps), (std::vector<double>{1.5, 2.0, 2.5}));
    EXPECT_TRUE(coverage_growth_curve({}).empty());
}

TEST(Growth, CurvesNeverDecrease) {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::vector<std::set<std::string>>> reps(1 + gen() % 4);
        for (auto& rep : reps) {
            rep.resize(gen() % 15);
            for (auto& run : rep) {
                const auto k = gen() % 5;
                for (std::uint64_t i = 0; i < k; ++i) run.insert("e" + std::to_string(gen() % 20));
            }
        }
        const auto curve = coverage_growth_curve(reps);
        for (std::size_t i = 1; i < curve.size(); ++i) ASSERT_GE(curve[i], curve[i - 1]);
        for (const auto& rep : reps) {
            const auto c = cumulative_unique(rep);
            for (std::size_t i = 1; i < c.size(); ++i) ASSERT_GE(c[i], c[i - 1]);
        }
    }
}
