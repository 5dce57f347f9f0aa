#include <algorithm>
#include <cmath>

#include "xstab/attack.hpp"
#include "xstab/errors.hpp"

namespace xstab {

AttackOutcome greedy_attack(const TextClassifier& model, const EmbeddingStore& store,
                            const Document& base, const AttackConfig& cfg) {
  AttackContext ctx(model, store, base, cfg);
  AttackOutcome outcome;

  // Walk order: ascending |importance| to the target model, ties by position.
  struct IndexedImportance {
    std::size_t index;
    double magnitude;
  };
  std::vector<IndexedImportance> order;
  order.reserve(ctx.perturbable_indices().size());
  for (std::size_t index : ctx.perturbable_indices()) {
    order.push_back({index, std::fabs(ctx.base_word_importance(index))});
  }
  std::sort(order.begin(), order.end(), [](const IndexedImportance& l,
                                           const IndexedImportance& r) {
    if (l.magnitude != r.magnitude) return l.magnitude < r.magnitude;
    return l.index < r.index;
  });

  Document current = base;
  double best_similarity = ctx.evaluate(base).similarity;
  int step = 0;

  for (const auto& [index, magnitude] : order) {
    if (best_similarity <= cfg.tau) break;
    if (current.replaced.size() >= ctx.budget()) break;

    const std::string& word = base.tokens[index];
    const AttackContext::Eval* chosen = nullptr;
    Document chosen_doc;
    for (const auto& neighbor : ctx.neighbor_candidates(word)) {
      Document candidate = apply_replacement(current, index, neighbor.word);
      const AttackContext::Eval& eval = ctx.evaluate(candidate);
      if (!eval.report.accepts(cfg.strict_semantic)) continue;
      if (eval.similarity >= best_similarity) continue;
      if (!chosen || eval.similarity < chosen->similarity) {
        chosen = &eval;
        chosen_doc = std::move(candidate);
      }
    }
    if (!chosen) continue;

    current = std::move(chosen_doc);
    best_similarity = chosen->similarity;
    const Replacement& applied = current.replaced.at(index);
    outcome.perturbations.push_back(
        {index, applied.original, applied.replacement, best_similarity});
    outcome.transcript.push_back({++step, "accept", static_cast<int>(index),
                                  applied.original, applied.replacement,
                                  best_similarity, ""});
  }

  outcome.final_doc = std::move(current);
  outcome.final_similarity = best_similarity;
  outcome.success = best_similarity <= cfg.tau;
  outcome.semantic_ok = ctx.semantic_check(outcome.final_doc);
  outcome.queries = ctx.queries();
  outcome.explain_calls = ctx.explain_calls();
  outcome.transcript.push_back(
      {++step, "result", -1, "", "", best_similarity,
       outcome.success ? "success" : "failure"});
  return outcome;
}

}  // namespace xstab
