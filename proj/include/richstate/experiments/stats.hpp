#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace richstate {

/// round(100 * (rich - empty) / empty), halves away from zero.
/// Throws Error(undefined_increase) when empty_total is 0.
int increase_pct(std::size_t empty_total, std::size_t rich_total);

struct VennCounts {
    std::size_t only_a = 0;
    std::size_t both = 0;
    std::size_t only_b = 0;

    friend bool operator==(const VennCounts&, const VennCounts&) = default;
};

template <class T, class Cmp>
VennCounts venn_partition(const std::set<T, Cmp>& a, const std::set<T, Cmp>& b) {
    VennCounts v;
    for (const auto& x : a) (b.contains(x) ? v.both : v.only_a) += 1;
    v.only_b = b.size() - v.both;
    return v;
}

/// Partition from totals and one side's exclusive count.
/// Throws Error(validation) when the numbers cannot describe two sets.
VennCounts venn_from_totals(std::size_t total_a, std::size_t total_b, std::size_t only_a);

enum class Sidedness { two_sided, greater, less };

/// Exact enumeration at most this many non-zero differences; normal
/// approximation above.
inline constexpr std::size_t kWilcoxonExactLimit = 20;

/// Paired signed-rank test on x - y. `greater` tests x > y. All-zero
/// differences give 1.0. Throws Error(validation) for mismatched or empty input.
double wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                            Sidedness sidedness = Sidedness::two_sided);

/// P(X > Y) + 0.5 P(X = Y) over all cross pairs. Throws Error(validation) on empty input.
double vargha_delaney_a12(std::span<const double> xs, std::span<const double> ys);

/// |union of runs[0..j]| for each j.
std::vector<std::size_t> cumulative_unique(std::span<const std::set<std::string>> runs);

/// Mean across replicates of the cumulative unique count at each run index.
/// A replicate shorter than the longest holds its final value.
std::vector<double> coverage_growth_curve(
    std::span<const std::vector<std::set<std::string>>> replicates);

}  // namespace richstate
