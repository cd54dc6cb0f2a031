#include "richstate/experiments/stats.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>

#include "richstate/core/error.hpp"

namespace richstate {

int increase_pct(std::size_t empty_total, std::size_t rich_total) {
    if (empty_total == 0) {
        throw Error(ErrorKind::undefined_increase, "increase over an empty baseline is undefined");
    }
    const auto num = 100 * (static_cast<std::int64_t>(rich_total) - static_cast<std::int64_t>(empty_total));
    const auto den = static_cast<std::int64_t>(empty_total);
    const std::int64_t magnitude = (2 * std::llabs(num) + den) / (2 * den);
    return static_cast<int>(num < 0 ? -magnitude : magnitude);
}

VennCounts venn_from_totals(std::size_t total_a, std::size_t total_b, std::size_t only_a) {
    if (only_a > total_a) throw Error(ErrorKind::validation, "exclusive count exceeds its total");
    const std::size_t both = total_a - only_a;
    if (both > total_b) throw Error(ErrorKind::validation, "shared count exceeds the other total");
    return VennCounts{only_a, both, total_b - both};
}

namespace {

struct RankedDiffs {
    /// Doubled ranks keep tie averages integral.
    std::vector<std::int64_t> doubled_ranks;
    std::int64_t doubled_positive_sum = 0;
    std::vector<std::size_t> tie_sizes;
};

RankedDiffs rank_differences(std::span<const double> x, std::span<const double> y) {
    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        if (diff != 0.0) d.push_back(diff);
    }
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
    RankedDiffs r;
    r.doubled_ranks.resize(d.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
        const auto doubled = static_cast<std::int64_t>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) r.doubled_ranks[order[k]] = doubled;
        r.tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > 0) r.doubled_positive_sum += r.doubled_ranks[i];
    }
    return r;
}

double exact_p(const RankedDiffs& r, Sidedness sidedness) {
    const std::int64_t total = std::accumulate(r.doubled_ranks.begin(), r.doubled_ranks.end(),
                                               std::int64_t{0});
    // ways[s] = number of sign assignments whose positive doubled-rank sum is s
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    std::int64_t reach = 0;
    for (std::int64_t rank : r.doubled_ranks) {
        for (std::int64_t s = reach; s >= 0; --s) {
            if (ways[s] != 0.0) ways[s + rank] += ways[s];
        }
        reach += rank;
    }
    const double all = std::ldexp(1.0, static_cast<int>(r.doubled_ranks.size()));
    double lower = 0.0, upper = 0.0;
    for (std::int64_t s = 0; s <= total; ++s) {
        if (s <= r.doubled_positive_sum) lower += ways[s];
        if (s >= r.doubled_positive_sum) upper += ways[s];
    }
    lower /= all;
    upper /= all;
    switch (sidedness) {
    case Sidedness::greater: return upper;
    case Sidedness::less: return lower;
    case Sidedness::two_sided: return std::min(1.0, 2.0 * std::min(lower, upper));
    }
    return 1.0;
}

double normal_p(const RankedDiffs& r, Sidedness sidedness) {
    const double m = static_cast<double>(r.doubled_ranks.size());
    const double w = static_cast<double>(r.doubled_positive_sum) / 2.0;
    const double mean = m * (m + 1.0) / 4.0;
    double variance = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0;
    for (std::size_t t : r.tie_sizes) {
        const double td = static_cast<double>(t);
        variance -= (td * td * td - td) / 48.0;
    }
    if (variance <= 0.0) return 1.0;
    const double sd = std::sqrt(variance);
    auto upper_tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
    switch (sidedness) {
    case Sidedness::greater: return upper_tail((w - mean - 0.5) / sd);
    case Sidedness::less: return upper_tail((mean - w - 0.5) / sd);
    case Sidedness::two_sided: {
        const double z = std::max(0.0, std::fabs(w - mean) - 0.5) / sd;
        return std::min(1.0, 2.0 * upper_tail(z));
    }
    }
    return 1.0;
}

}  // namespace

double wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                            Sidedness sidedness) {
    if (x.size() != y.size()) throw Error(ErrorKind::validation, "paired samples differ in length");
    if (x.empty()) throw Error(ErrorKind::validation, "paired samples are empty");
    const RankedDiffs r = rank_differences(x, y);
    if (r.doubled_ranks.empty()) return 1.0;
    return r.doubled_ranks.size() <= kWilcoxonExactLimit ? exact_p(r, sidedness)
                                                         : normal_p(r, sidedness);
}

double vargha_delaney_a12(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw Error(ErrorKind::validation, "A12 needs two non-empty samples");
    double wins = 0.0;
    for (double x : xs) {
        for (double y : ys) {
            if (x > y) {
                wins += 1.0;
            } else if (x == y) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

std::vector<std::size_t> cumulative_unique(std::span<const std::set<std::string>> runs) {
    std::set<std::string> seen;
    std::vector<std::size_t> out;
    out.reserve(runs.size());
    for (const auto& run : runs) {
        seen.insert(run.begin(), run.end());
        out.push_back(seen.size());
    }
    return out;
}

std::vector<double> coverage_growth_curve(
    std::span<const std::vector<std::set<std::string>>> replicates) {
    std::size_t longest = 0;
    for (const auto& r : replicates) longest = std::max(longest, r.size());
    std::vector<double> sum(longest, 0.0);
    for (const auto& r : replicates) {
        const auto counts = cumulative_unique(r);
        for (std::size_t j = 0; j < longest; ++j) {
            const std::size_t c = counts.empty() ? 0 : counts[std::min(j, counts.size() - 1)];
            sum[j] += static_cast<double>(c);
        }
    }
    for (double& v : sum) v /= static_cast<double>(replicates.size());
    return sum;
}

}  // namespace richstate
