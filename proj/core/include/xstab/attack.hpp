#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "xstab/embedding.hpp"
#include "xstab/lime.hpp"
#include "xstab/model.hpp"
#include "xstab/rank_sim.hpp"
#include "xstab/rng.hpp"
#include "xstab/text.hpp"

namespace xstab {

struct AttackConfig {
  Measure measure = Measure::kRbo05;
  double tau = 0.5;             // success threshold on explanation similarity
  double delta = 0.8;           // semantic similarity floor (post-hoc)
  double epsilon = 0.3;         // max perturbed fraction of non-punct tokens
  int top_k = 1;                // protected leading features
  int neighbors = 20;           // replacement candidates per word
  double min_cos = 0.5;         // neighbor cosine floor
  std::uint64_t seed = 0;       // master seed for this attack
  int ga_population = 10;
  int ga_generations = 10;
  bool strict_semantic = false; // when set, the semantic check vetoes candidates
  ExplainerParams explainer;

  void validate() const;  // throws ParameterError
};

/// Per-constraint outcome of one candidate check. The semantic flag is
/// informational unless strict mode is on.
struct ConstraintReport {
  bool prediction_unchanged = false;
  bool within_budget = false;
  bool topk_present = false;
  bool semantic_ok = false;

  bool accepts(bool strict_semantic) const {
    return prediction_unchanged && within_budget && topk_present &&
           (!strict_semantic || semantic_ok);
  }
};

struct PerturbationRecord {
  std::size_t index = 0;
  std::string old_word;
  std::string new_word;
  double similarity_after = 1.0;  // explanation similarity when accepted
};

struct TranscriptStep {
  int step = 0;
  std::string event;      // accept | generation | replacement | result
  int index = -1;         // token index, -1 when not applicable
  std::string old_word;
  std::string new_word;
  double similarity = 1.0;
  std::string note;
};

struct GenerationStat {
  int generation = 0;
  double best_similarity = 1.0;
  int population = 0;
};

struct AttackOutcome {
  bool success = false;
  Document final_doc;
  double final_similarity = 1.0;
  std::vector<PerturbationRecord> perturbations;
  long queries = 0;        // model predict calls
  long explain_calls = 0;
  bool semantic_ok = false;
  std::vector<TranscriptStep> transcript;
  std::vector<GenerationStat> generations;  // genetic search only
};

/// Evaluates the full constraint set for a candidate: prediction invariance,
/// perturbation budget, protected top-k feature presence, and the post-hoc
/// semantic floor. The report is total; nothing throws for a failing check.
ConstraintReport check_constraints(const Document& base, const Document& candidate,
                                   const Explanation& base_explanation,
                                   const Explanation& candidate_explanation,
                                   const TextClassifier& model,
                                   const EmbeddingStore& store,
                                   const AttackConfig& cfg);

/// Shipped stop-word list; stop-word tokens are never perturbed.
const std::unordered_set<std::string>& stop_words();

/// Shared candidate-evaluation state for one attack: the base document and
/// its explanation, query counters, neighbor lists, and a cache keyed by
/// candidate token list so re-evaluating an identical candidate never costs
/// a second explanation. Explanation seeds derive from (master seed, token
/// hash), which makes similarity values comparable across search strategies.
class AttackContext {
 public:
  AttackContext(const TextClassifier& model, const EmbeddingStore& store,
                Document base, AttackConfig cfg);

  struct Eval {
    Explanation explanation;
    double similarity = 1.0;
    ConstraintReport report;
  };

  const Eval& evaluate(const Document& candidate);

  const Document& base_doc() const { return base_; }
  const Explanation& base_explanation() const { return base_explanation_; }
  const AttackConfig& config() const { return cfg_; }
  const TextClassifier& model() const { return model_; }
  const EmbeddingStore& store() const { return store_; }

  /// Token indices eligible for perturbation in the base document: not
  /// punctuation, not a stop word, not one of the protected top-k feature
  /// words.
  const std::vector<std::size_t>& perturbable_indices() const { return perturbable_; }

  /// Replacement candidates for a base-document word, cached per word.
  const std::vector<Neighbor>& neighbor_candidates(const std::string& word);

  /// ceil(epsilon * non-punctuation token count of the base document).
  std::size_t budget() const { return budget_; }

  int base_class() const { return base_class_; }
  long queries() const { return queries_; }
  long explain_calls() const { return explain_calls_; }

  /// word_importance on the base document, with query accounting.
  double base_word_importance(std::size_t index);

  /// Semantic similarity of candidate vs base; false when coverage fails.
  bool semantic_check(const Document& candidate) const;

 private:
  LabelDistribution counted_predict(const std::vector<std::string>& tokens);

  const TextClassifier& model_;
  const EmbeddingStore& store_;
  AttackConfig cfg_;
  Document base_;
  Explanation base_explanation_;
  RankedList base_ranked_;
  std::vector<std::string> protected_words_;
  std::vector<std::size_t> perturbable_;
  std::size_t budget_ = 0;
  int base_class_ = 0;
  double base_probability_ = 0.0;
  long queries_ = 0;
  long explain_calls_ = 0;
  std::unordered_map<std::string, Eval> cache_;
  std::unordered_map<std::string, std::vector<Neighbor>> neighbor_cache_;
};

/// Greedy baseline: walk base-document indices from least to most important
/// and keep the neighbor replacement with the lowest resulting similarity,
/// provided it strictly improves on the best so far and passes constraints.
/// Stops at similarity <= tau, budget exhaustion, or index exhaustion.
AttackOutcome greedy_attack(const TextClassifier& model, const EmbeddingStore& store,
                            const Document& base, const AttackConfig& cfg);

/// One population member of the genetic search.
struct Chromosome {
  Document doc;
  Explanation explanation;
  double similarity = 1.0;
  ConstraintReport report;
  std::vector<PerturbationRecord> records;
};

/// Visits unperturbed eligible indices in random order and adopts the first
/// neighbor replacement (descending cosine) that is strictly better than the
/// parent and passes constraints. Returns the parent unchanged when nothing
/// improves.
Chromosome mutate(const Chromosome& parent, AttackContext& ctx, Rng& rng);

/// Single-point suffix swap at a uniform index in [1, tokens-1]; replacement
/// records are recomputed against the base document. An invalid child is
/// replaced by a uniformly chosen parent. Throws LineageError when the
/// parents' token counts differ.
Chromosome crossover(const Chromosome& p1, const Chromosome& p2, AttackContext& ctx,
                     Rng& rng);

/// Population search: the base document is mutated into an initial population,
/// then each generation keeps the better half by fitness (similarity, then
/// fewer perturbations), breeds children back to full size by crossover, and
/// mutates them. The best chromosome ever seen is tracked separately and
/// produces the outcome. Terminates at global best <= tau or the generation
/// limit.
AttackOutcome genetic_attack(const TextClassifier& model, const EmbeddingStore& store,
                             const Document& base, const AttackConfig& cfg);

}  // namespace xstab
