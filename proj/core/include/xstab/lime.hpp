#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xstab/model.hpp"
#include "xstab/rng.hpp"
#include "xstab/text.hpp"

namespace xstab {

struct ExplainerParams {
  int samples = 500;          // masked samples per explanation
  double mask_rate = 0.3;     // per-word removal probability
  int max_features = 10;      // explanation length cap
  double kernel_width = 0.25; // locality kernel on cosine distance

  void validate() const;  // throws ParameterError
};

struct ExplanationFeature {
  std::string word;
  double weight;  // signed surrogate coefficient
};

/// Ranked surrogate explanation for one prediction. Features are ordered by
/// |weight| descending, ties broken by word ascending; words are distinct and
/// all occur in the explained document.
struct Explanation {
  std::vector<ExplanationFeature> features;
  int target_class = 0;
  std::uint64_t seed = 0;
};

struct MaskedSample {
  std::vector<std::uint8_t> present;   // one flag per distinct word
  std::vector<std::string> tokens;     // doc tokens minus removed words
};

/// Distinct non-punctuation words of the document, first-occurrence order.
/// This is the explainer's feature universe.
std::vector<std::string> distinct_feature_words(const Document& doc);

/// Draws `params.samples` masked variants. Sample 0 keeps every word; the
/// rest remove each distinct word independently with probability mask_rate,
/// deleting all of its occurrences. Throws DegenerateDocumentError when the
/// document has fewer than two distinct non-punctuation words.
std::vector<MaskedSample> sample_masked(const Document& doc,
                                        const ExplainerParams& params, Rng& rng);

/// Fits a weighted ridge surrogate (penalty 1.0, unpenalized intercept) from
/// word-presence features to the target-class probability of each masked
/// sample, weighting samples by exp(-(1 - sqrt(kept/total))^2 / width^2).
/// Deterministic given (model, doc, params, seed).
Explanation explain(const TextClassifier& model, const Document& doc,
                    const ExplainerParams& params, std::uint64_t seed);

}  // namespace xstab
