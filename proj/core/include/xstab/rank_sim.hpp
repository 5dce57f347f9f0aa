#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xstab/lime.hpp"

namespace xstab {

/// A ranked list of distinct items with normalized non-negative weights.
/// Weights sum to 1; when every source weight is zero the list falls back to
/// uniform weights so the weighted measures stay well-defined.
struct RankedList {
  std::vector<std::string> items;
  std::vector<double> weights;

  static RankedList from_explanation(const Explanation& explanation);
  /// Uniform weights over the given items.
  static RankedList of(std::vector<std::string> items);
  /// Normalizes |raw_weights|; falls back to uniform when all are zero.
  static RankedList with_weights(std::vector<std::string> items,
                                 std::vector<double> raw_weights);
};

enum class Measure {
  kRbo05,
  kRbo07,
  kRbo09,
  kJaccard,
  kJaccardWeighted,
  kKendall,
  kKendallWeighted,
  kSpearman,
  kSpearmanWeighted,
};

inline constexpr std::array<Measure, 9> kAllMeasures = {
    Measure::kRbo05,   Measure::kRbo07,          Measure::kRbo09,
    Measure::kJaccard, Measure::kJaccardWeighted, Measure::kKendall,
    Measure::kKendallWeighted, Measure::kSpearman, Measure::kSpearmanWeighted,
};

std::string_view measure_name(Measure measure);
std::optional<Measure> parse_measure(std::string_view name);

/// Set overlap: |A n B| / |A u B|. Weighted form: sum of per-item minimum
/// weights over sum of maximums, absent items counting as zero.
double jaccard(const RankedList& a, const RankedList& b, bool weighted);

/// Rank-biased overlap truncated at depth max(|a|,|b|) and renormalized so
/// identical finite lists score exactly 1. p in (0,1); larger p weights
/// deeper ranks more evenly.
double rbo(const RankedList& a, const RankedList& b, double p);

/// 1 - discordant pair fraction over the union of items, where an item
/// missing from a list ranks one past the union size and same-rank pairs are
/// never discordant. Weighted form scales each pair by the mean of its
/// items' pair-averaged weights.
double kendall(const RankedList& a, const RankedList& b, bool weighted);

/// 1 - footrule distance / maximum attainable distance, over the union with
/// the same sentinel rank convention; clamped to [0,1]. Weighted form scales
/// each displacement by the item's pair-averaged weight.
double spearman(const RankedList& a, const RankedList& b, bool weighted);

double similarity(Measure measure, const RankedList& a, const RankedList& b);

/// Maximum footrule distance between a list of len_a and one of len_b whose
/// union has union_size items, under the sentinel convention. Exact (cached
/// brute force) for union_size <= 8; an analytic upper bound beyond that.
long footrule_max_distance(int len_a, int len_b, int union_size);

}  // namespace xstab
