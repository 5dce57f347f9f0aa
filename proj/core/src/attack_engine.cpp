#include "xstab/attack.hpp"

#include <algorithm>
#include <cmath>

#include "xstab/errors.hpp"

namespace xstab {

namespace {

std::string cache_key(const std::vector<std::string>& tokens) {
  std::string key;
  std::size_t total = 0;
  for (const auto& t : tokens) total += t.size() + 1;
  key.reserve(total);
  for (const auto& t : tokens) {
    key += t;
    key.push_back('\x1f');
  }
  return key;
}

}  // namespace

void AttackConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("tau must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1]");
  }
  if (top_k < 0) throw ParameterError("top_k must be >= 0");
  if (neighbors < 0) throw ParameterError("neighbors must be >= 0");
  if (ga_population < 2 || ga_population % 2 != 0) {
    throw ParameterError("ga_population must be even and >= 2");
  }
  if (ga_generations < 1) throw ParameterError("ga_generations must be >= 1");
  explainer.validate();
}

const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> words = {
      "a",    "an",   "and",  "are",  "as",   "at",   "be",    "been",  "but",
      "by",   "did",  "do",   "does", "for",  "from", "had",   "has",   "have",
      "he",   "her",  "him",  "his",  "i",    "if",   "in",    "is",    "it",
      "its",  "me",   "my",   "no",   "not",  "of",   "on",    "or",    "our",
      "she",  "so",   "that", "the",  "their", "them", "then", "these", "they",
      "this", "those", "to",  "too",  "us",   "was",  "we",    "were",  "what",
      "when", "which", "while", "who", "will", "with", "you",  "your",
  };
  return words;
}

ConstraintReport check_constraints(const Document& base, const Document& candidate,
                                   const Explanation& base_explanation,
                                   const Explanation& candidate_explanation,
                                   const TextClassifier& model,
                                   const EmbeddingStore& store,
                                   const AttackConfig& cfg) {
  ConstraintReport report;
  report.prediction_unchanged =
      model.predict(base.tokens).argmax() == model.predict(candidate.tokens).argmax();

  double budget = std::ceil(cfg.epsilon * static_cast<double>(non_punct_token_count(base)) -
                            1e-9);
  report.within_budget =
      static_cast<double>(candidate.replaced.size()) <= budget;

  report.topk_present = true;
  std::size_t protect = std::min<std::size_t>(static_cast<std::size_t>(cfg.top_k),
                                              base_explanation.features.size());
  for (std::size_t i = 0; i < protect && report.topk_present; ++i) {
    const std::string& word = base_explanation.features[i].word;
    bool found = false;
    for (const auto& feature : candidate_explanation.features) {
      if (feature.word == word) {
        found = true;
        break;
      }
    }
    report.topk_present = found;
  }

  try {
    report.semantic_ok = doc_similarity(store, base, candidate) >= cfg.delta;
  } catch (const CoverageError&) {
    report.semantic_ok = false;
  }
  return report;
}

AttackContext::AttackContext(const TextClassifier& model, const EmbeddingStore& store,
                             Document base, AttackConfig cfg)
    : model_(model), store_(store), cfg_(std::move(cfg)), base_(std::move(base)) {
  cfg_.validate();

  std::size_t content_tokens = non_punct_token_count(base_);
  budget_ = static_cast<std::size_t>(
      std::ceil(cfg_.epsilon * static_cast<double>(content_tokens) - 1e-9));

  LabelDistribution base_distribution = counted_predict(base_.tokens);
  base_class_ = base_distribution.argmax();
  base_probability_ = base_distribution.probabilities[base_class_];

  // The base explanation goes through the same evaluate() path as every
  // candidate, so its seed (and the cache) line up with later evaluations.
  const Eval& base_eval = evaluate(base_);
  base_explanation_ = base_eval.explanation;
  base_ranked_ = RankedList::from_explanation(base_explanation_);

  std::size_t protect = std::min<std::size_t>(static_cast<std::size_t>(cfg_.top_k),
                                              base_explanation_.features.size());
  for (std::size_t i = 0; i < protect; ++i) {
    protected_words_.push_back(base_explanation_.features[i].word);
  }

  for (std::size_t i = 0; i < base_.tokens.size(); ++i) {
    const std::string& token = base_.tokens[i];
    if (is_punctuation_token(token)) continue;
    if (stop_words().contains(token)) continue;
    if (std::find(protected_words_.begin(), protected_words_.end(), token) !=
        protected_words_.end()) {
      continue;
    }
    perturbable_.push_back(i);
  }
}

LabelDistribution AttackContext::counted_predict(const std::vector<std::string>& tokens) {
  ++queries_;
  return model_.predict(tokens);
}

const AttackContext::Eval& AttackContext::evaluate(const Document& candidate) {
  std::string key = cache_key(candidate.tokens);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  Eval eval;
  std::uint64_t explanation_seed = mix_seed(cfg_.seed, hash_tokens(candidate.tokens));
  eval.explanation = explain(model_, candidate, cfg_.explainer, explanation_seed);
  queries_ += cfg_.explainer.samples + 1;  // masked samples + target-class probe
  ++explain_calls_;

  if (base_ranked_.items.empty()) {
    // Bootstrapping: the constructor evaluates the base document before
    // base_ranked_ exists, and the base compares against itself.
    RankedList self = RankedList::from_explanation(eval.explanation);
    eval.similarity = similarity(cfg_.measure, self, self);
  } else {
    eval.similarity = similarity(cfg_.measure, base_ranked_,
                                 RankedList::from_explanation(eval.explanation));
  }

  eval.report.prediction_unchanged =
      counted_predict(candidate.tokens).argmax() == base_class_;
  eval.report.within_budget = candidate.replaced.size() <= budget_;
  eval.report.topk_present = true;
  for (const auto& word : protected_words_) {
    bool found = false;
    for (const auto& feature : eval.explanation.features) {
      if (feature.word == word) {
        found = true;
        break;
      }
    }
    if (!found) {
      eval.report.topk_present = false;
      break;
    }
  }
  eval.report.semantic_ok = semantic_check(candidate);

  return cache_.emplace(std::move(key), std::move(eval)).first->second;
}

double AttackContext::base_word_importance(std::size_t index) {
  if (index >= base_.tokens.size()) {
    throw RangeError("importance index " + std::to_string(index) + " out of range");
  }
  std::vector<std::string> without;
  without.reserve(base_.tokens.size() - 1);
  for (std::size_t i = 0; i < base_.tokens.size(); ++i) {
    if (i != index) without.push_back(base_.tokens[i]);
  }
  return base_probability_ - counted_predict(without).probabilities[base_class_];
}

const std::vector<Neighbor>& AttackContext::neighbor_candidates(const std::string& word) {
  auto it = neighbor_cache_.find(word);
  if (it != neighbor_cache_.end()) return it->second;
  auto neighbors = nearest_neighbors(store_, word, cfg_.neighbors, cfg_.min_cos);
  return neighbor_cache_.emplace(word, std::move(neighbors)).first->second;
}

bool AttackContext::semantic_check(const Document& candidate) const {
  try {
    return doc_similarity(store_, base_, candidate) >= cfg_.delta;
  } catch (const CoverageError&) {
    return false;
  }
}

}  // namespace xstab
