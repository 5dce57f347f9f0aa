#include "xstab/rank_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <tuple>
#include <unordered_set>

#include "xstab/errors.hpp"

namespace xstab {

namespace {

void validate_list(const RankedList& list, const char* side) {
  if (list.items.empty()) {
    throw EmptyExplanationError(std::string("empty ranked list: ") + side);
  }
}

std::vector<double> normalize_weights(std::vector<double> raw) {
  double sum = 0.0;
  for (double& w : raw) {
    w = std::fabs(w);
    sum += w;
  }
  if (sum > 0.0) {
    for (double& w : raw) w /= sum;
  } else {
    double uniform = 1.0 / static_cast<double>(raw.size());
    for (double& w : raw) w = uniform;
  }
  return raw;
}

void check_distinct(const std::vector<std::string>& items) {
  std::unordered_set<std::string_view> seen;
  for (const auto& item : items) {
    if (!seen.insert(item).second) {
      throw ParameterError("ranked list has duplicate item '" + item + "'");
    }
  }
}

// Union of both item sets in lexicographic order, with the 1-based rank of
// each item in each list (0 = absent). Sorting pins the accumulation order,
// which keeps the weighted measures bitwise symmetric in their arguments.
struct UnionView {
  std::vector<std::string_view> items;
  std::vector<int> rank_a;  // 0 when absent
  std::vector<int> rank_b;
  std::vector<double> weight_a;
  std::vector<double> weight_b;
};

UnionView make_union(const RankedList& a, const RankedList& b) {
  std::map<std::string_view, std::size_t> index;
  for (const auto& item : a.items) index.emplace(item, 0);
  for (const auto& item : b.items) index.emplace(item, 0);

  UnionView u;
  u.items.reserve(index.size());
  for (auto& [item, slot] : index) {
    slot = u.items.size();
    u.items.push_back(item);
  }
  u.rank_a.assign(u.items.size(), 0);
  u.rank_b.assign(u.items.size(), 0);
  u.weight_a.assign(u.items.size(), 0.0);
  u.weight_b.assign(u.items.size(), 0.0);
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    std::size_t slot = index.at(a.items[i]);
    u.rank_a[slot] = static_cast<int>(i) + 1;
    u.weight_a[slot] = a.weights[i];
  }
  for (std::size_t i = 0; i < b.items.size(); ++i) {
    std::size_t slot = index.at(b.items[i]);
    u.rank_b[slot] = static_cast<int>(i) + 1;
    u.weight_b[slot] = b.weights[i];
  }
  return u;
}

// Exhaustive maximum footrule distance for one (len_a, len_b, union) shape.
// The first list is pinned to a canonical labeling (items 0..len_a-1 at ranks
// 1..len_a, the rest absent); every second-list configuration that completes
// the union is enumerated.
long brute_force_footrule_max(int len_a, int len_b, int union_size) {
  const int sentinel = union_size + 1;
  const int overlap = len_a + len_b - union_size;
  std::vector<int> rank_a(union_size, sentinel);
  for (int i = 0; i < len_a; ++i) rank_a[i] = i + 1;

  long best = 0;
  // Choose which canonically ranked items also appear in list b.
  for (unsigned mask = 0; mask < (1u << len_a); ++mask) {
    if (std::popcount(mask) != overlap) continue;
    std::vector<int> members;  // items of list b
    for (int i = 0; i < len_a; ++i) {
      if (mask & (1u << i)) members.push_back(i);
    }
    for (int i = len_a; i < union_size; ++i) members.push_back(i);
    std::vector<int> ranks(len_b);
    for (int i = 0; i < len_b; ++i) ranks[i] = i + 1;
    std::sort(ranks.begin(), ranks.end());
    do {
      std::vector<int> rank_b(union_size, sentinel);
      for (int i = 0; i < len_b; ++i) rank_b[members[i]] = ranks[i];
      long total = 0;
      for (int i = 0; i < union_size; ++i) {
        total += std::labs(static_cast<long>(rank_a[i]) - rank_b[i]);
      }
      best = std::max(best, total);
    } while (std::next_permutation(ranks.begin(), ranks.end()));
  }
  return best;
}

}  // namespace

RankedList RankedList::from_explanation(const Explanation& explanation) {
  RankedList list;
  list.items.reserve(explanation.features.size());
  list.weights.reserve(explanation.features.size());
  for (const auto& feature : explanation.features) {
    list.items.push_back(feature.word);
    list.weights.push_back(feature.weight);
  }
  check_distinct(list.items);
  if (!list.items.empty()) list.weights = normalize_weights(std::move(list.weights));
  return list;
}

RankedList RankedList::of(std::vector<std::string> items) {
  check_distinct(items);
  RankedList list;
  list.weights.assign(items.size(), items.empty() ? 0.0 : 1.0 / items.size());
  list.items = std::move(items);
  return list;
}

RankedList RankedList::with_weights(std::vector<std::string> items,
                                    std::vector<double> raw_weights) {
  if (items.size() != raw_weights.size()) {
    throw ParameterError("items and weights differ in length");
  }
  check_distinct(items);
  RankedList list;
  list.items = std::move(items);
  if (!list.items.empty()) list.weights = normalize_weights(std::move(raw_weights));
  return list;
}

std::string_view measure_name(Measure measure) {
  switch (measure) {
    case Measure::kRbo05: return "rbo05";
    case Measure::kRbo07: return "rbo07";
    case Measure::kRbo09: return "rbo09";
    case Measure::kJaccard: return "jaccard";
    case Measure::kJaccardWeighted: return "jaccard_w";
    case Measure::kKendall: return "kendall";
    case Measure::kKendallWeighted: return "kendall_w";
    case Measure::kSpearman: return "spearman";
    case Measure::kSpearmanWeighted: return "spearman_w";
  }
  return "unknown";
}

std::optional<Measure> parse_measure(std::string_view name) {
  for (Measure m : kAllMeasures) {
    if (measure_name(m) == name) return m;
  }
  return std::nullopt;
}

double jaccard(const RankedList& a, const RankedList& b, bool weighted) {
  validate_list(a, "a");
  validate_list(b, "b");
  UnionView u = make_union(a, b);
  if (!weighted) {
    int intersection = 0;
    for (std::size_t i = 0; i < u.items.size(); ++i) {
      if (u.rank_a[i] > 0 && u.rank_b[i] > 0) ++intersection;
    }
    return static_cast<double>(intersection) / static_cast<double>(u.items.size());
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < u.items.size(); ++i) {
    num += std::min(u.weight_a[i], u.weight_b[i]);
    den += std::max(u.weight_a[i], u.weight_b[i]);
  }
  if (den == 0.0) return 1.0;
  return num / den;
}

double rbo(const RankedList& a, const RankedList& b, double p) {
  validate_list(a, "a");
  validate_list(b, "b");
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("rbo p must lie in (0, 1)");

  const std::size_t depth = std::max(a.items.size(), b.items.size());
  // Incremental prefix overlap: an item sits in `pending` after one list has
  // produced it and before the other has. Items are distinct within a list,
  // so a hit in `pending` always pairs elements from opposite lists.
  std::unordered_set<std::string_view> pending;
  int overlap = 0;
  double weight = 1.0;  // p^(d-1)
  double sum = 0.0;
  double norm = 0.0;
  for (std::size_t d = 1; d <= depth; ++d) {
    const bool has_a = d <= a.items.size();
    const bool has_b = d <= b.items.size();
    if (has_a && has_b && a.items[d - 1] == b.items[d - 1]) {
      ++overlap;
    } else {
      if (has_a) {
        if (pending.erase(a.items[d - 1]) == 1) ++overlap;
        else pending.insert(a.items[d - 1]);
      }
      if (has_b) {
        if (pending.erase(b.items[d - 1]) == 1) ++overlap;
        else pending.insert(b.items[d - 1]);
      }
    }
    sum += weight * (static_cast<double>(overlap) / static_cast<double>(d));
    norm += weight;
    weight *= p;
  }
  return sum / norm;
}

double kendall(const RankedList& a, const RankedList& b, bool weighted) {
  validate_list(a, "a");
  validate_list(b, "b");
  UnionView u = make_union(a, b);
  const int n = static_cast<int>(u.items.size());
  const int sentinel = n + 1;
  if (n < 2) return 1.0;

  auto rank = [&](const std::vector<int>& ranks, int i) {
    return ranks[i] > 0 ? ranks[i] : sentinel;
  };

  long discordant = 0;
  long pairs = 0;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int da = rank(u.rank_a, i) - rank(u.rank_a, j);
      int db = rank(u.rank_b, i) - rank(u.rank_b, j);
      bool disc = (da < 0 && db > 0) || (da > 0 && db < 0);
      ++pairs;
      if (disc) ++discordant;
      if (weighted) {
        double wi = 0.5 * (u.weight_a[i] + u.weight_b[i]);
        double wj = 0.5 * (u.weight_a[j] + u.weight_b[j]);
        double penalty = 0.5 * (wi + wj);
        den += penalty;
        if (disc) num += penalty;
      }
    }
  }
  if (!weighted) {
    return 1.0 - static_cast<double>(discordant) / static_cast<double>(pairs);
  }
  if (den == 0.0) return 1.0;
  return 1.0 - num / den;
}

long footrule_max_distance(int len_a, int len_b, int union_size) {
  if (len_a > union_size || len_b > union_size || len_a + len_b < union_size ||
      len_a < 1 || len_b < 1) {
    throw ParameterError("infeasible footrule shape");
  }
  if (union_size <= 8) {
    // Shapes are few; compute the whole table once.
    static const std::map<std::tuple<int, int, int>, long> table = [] {
      std::map<std::tuple<int, int, int>, long> t;
      for (int u = 1; u <= 8; ++u) {
        for (int la = 1; la <= u; ++la) {
          for (int lb = 1; lb <= u; ++lb) {
            if (la + lb < u) continue;
            t.emplace(std::make_tuple(la, lb, u), brute_force_footrule_max(la, lb, u));
          }
        }
      }
      return t;
    }();
    return table.at(std::make_tuple(len_a, len_b, union_size));
  }
  // Upper bound: conjoint displacement of the shared items cannot exceed the
  // full-permutation footrule maximum, and each absent-in-one-list item is
  // bounded by the sentinel gap from the smallest ranks.
  long u = union_size;
  long bound = (u * u) / 2;
  for (long i = 1; i <= u - len_b; ++i) bound += u + 1 - i;
  for (long i = 1; i <= u - len_a; ++i) bound += u + 1 - i;
  return bound;
}

double spearman(const RankedList& a, const RankedList& b, bool weighted) {
  validate_list(a, "a");
  validate_list(b, "b");
  UnionView u = make_union(a, b);
  const int n = static_cast<int>(u.items.size());
  const int sentinel = n + 1;

  auto rank = [&](const std::vector<int>& ranks, int i) {
    return ranks[i] > 0 ? ranks[i] : sentinel;
  };

  long distance = 0;
  double weighted_distance = 0.0;
  for (int i = 0; i < n; ++i) {
    int gap = std::abs(rank(u.rank_a, i) - rank(u.rank_b, i));
    distance += gap;
    if (weighted) {
      weighted_distance += 0.5 * (u.weight_a[i] + u.weight_b[i]) * gap;
    }
  }
  if (distance == 0) return 1.0;

  long max_distance =
      footrule_max_distance(static_cast<int>(a.items.size()),
                            static_cast<int>(b.items.size()), n);
  if (max_distance == 0) return 1.0;

  double sim;
  if (!weighted) {
    sim = 1.0 - static_cast<double>(distance) / static_cast<double>(max_distance);
  } else {
    // Uniform weights put 1/n on every item, so scaling the weighted distance
    // by n recovers the unweighted ratio.
    sim = 1.0 - weighted_distance * static_cast<double>(n) /
                    static_cast<double>(max_distance);
  }
  return std::clamp(sim, 0.0, 1.0);
}

double similarity(Measure measure, const RankedList& a, const RankedList& b) {
  switch (measure) {
    case Measure::kRbo05: return rbo(a, b, 0.5);
    case Measure::kRbo07: return rbo(a, b, 0.7);
    case Measure::kRbo09: return rbo(a, b, 0.9);
    case Measure::kJaccard: return jaccard(a, b, false);
    case Measure::kJaccardWeighted: return jaccard(a, b, true);
    case Measure::kKendall: return kendall(a, b, false);
    case Measure::kKendallWeighted: return kendall(a, b, true);
    case Measure::kSpearman: return spearman(a, b, false);
    case Measure::kSpearmanWeighted: return spearman(a, b, true);
  }
  throw ParameterError("unknown measure");
}

}  // namespace xstab
