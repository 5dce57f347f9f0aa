#include "xstab/lime.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "xstab/errors.hpp"

namespace xstab {

namespace {

// Cholesky solve of A x = b for symmetric positive definite A (row-major).
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) sum -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        a[i * n + i] = std::sqrt(std::max(sum, 1e-12));
      } else {
        a[i * n + j] = sum / a[j * n + j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a[i * n + k] * b[k];
    b[i] /= a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a[k * n + i] * b[k];
    b[i] /= a[i * n + i];
  }
  return b;
}

}  // namespace

void ExplainerParams::validate() const {
  if (samples < 10) throw ParameterError("explainer samples must be >= 10");
  if (!(mask_rate > 0.0 && mask_rate < 1.0)) {
    throw ParameterError("mask_rate must lie in (0, 1)");
  }
  if (max_features < 1) throw ParameterError("max_features must be >= 1");
  if (!(kernel_width > 0.0)) throw ParameterError("kernel_width must be > 0");
}

std::vector<std::string> distinct_feature_words(const Document& doc) {
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  for (const auto& token : doc.tokens) {
    if (is_punctuation_token(token)) continue;
    if (seen.insert(token).second) words.push_back(token);
  }
  return words;
}

std::vector<MaskedSample> sample_masked(const Document& doc,
                                        const ExplainerParams& params, Rng& rng) {
  params.validate();
  auto words = distinct_feature_words(doc);
  if (words.size() < 2) {
    throw DegenerateDocumentError(
        "document needs at least 2 distinct non-punctuation words, has " +
        std::to_string(words.size()));
  }

  std::unordered_map<std::string, std::size_t> word_index;
  for (std::size_t i = 0; i < words.size(); ++i) word_index.emplace(words[i], i);

  std::vector<MaskedSample> samples;
  samples.reserve(static_cast<std::size_t>(params.samples));
  for (int s = 0; s < params.samples; ++s) {
    MaskedSample sample;
    sample.present.assign(words.size(), 1);
    if (s > 0) {
      for (auto& flag : sample.present) {
        if (rng.uniform() < params.mask_rate) flag = 0;
      }
    }
    sample.tokens.reserve(doc.tokens.size());
    for (const auto& token : doc.tokens) {
      auto it = word_index.find(token);
      if (it != word_index.end() && !sample.present[it->second]) continue;
      sample.tokens.push_back(token);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

Explanation explain(const TextClassifier& model, const Document& doc,
                    const ExplainerParams& params, std::uint64_t seed) {
  Rng rng(seed);
  auto samples = sample_masked(doc, params, rng);
  auto words = distinct_feature_words(doc);
  const std::size_t num_words = words.size();
  const std::size_t dim = num_words + 1;  // intercept first

  Explanation result;
  result.seed = seed;
  result.target_class = model.predict(doc.tokens).argmax();

  // Weighted normal equations: (Z'WZ + lambda*I_coef) theta = Z'Wy.
  std::vector<double> a(dim * dim, 0.0);
  std::vector<double> b(dim, 0.0);
  std::vector<std::size_t> active;
  active.reserve(num_words);

  for (const auto& sample : samples) {
    double kept = 0.0;
    active.clear();
    for (std::size_t w = 0; w < num_words; ++w) {
      if (sample.present[w]) {
        kept += 1.0;
        active.push_back(w + 1);
      }
    }
    double cos = kept > 0.0 ? std::sqrt(kept / static_cast<double>(num_words)) : 0.0;
    double dist = 1.0 - cos;
    double wt = std::exp(-(dist * dist) / (params.kernel_width * params.kernel_width));
    double y = model.predict(sample.tokens).probabilities[result.target_class];

    a[0] += wt;
    b[0] += wt * y;
    for (std::size_t i : active) {
      a[i * dim + 0] += wt;
      a[0 * dim + i] += wt;
      b[i] += wt * y;
      for (std::size_t j : active) a[i * dim + j] += wt;
    }
  }
  constexpr double kRidgePenalty = 1.0;
  for (std::size_t i = 1; i < dim; ++i) a[i * dim + i] += kRidgePenalty;

  std::vector<double> theta = solve_spd(std::move(a), std::move(b));

  std::vector<std::size_t> order(num_words);
  for (std::size_t i = 0; i < num_words; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    double la = std::fabs(theta[l + 1]);
    double ra = std::fabs(theta[r + 1]);
    if (la != ra) return la > ra;
    return words[l] < words[r];
  });

  std::size_t keep = std::min<std::size_t>(order.size(),
                                           static_cast<std::size_t>(params.max_features));
  result.features.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    result.features.push_back({words[order[i]], theta[order[i] + 1]});
  }
  return result;
}

}  // namespace xstab
