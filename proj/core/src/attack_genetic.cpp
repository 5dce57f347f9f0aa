#include <algorithm>
#include <cstdio>

#include "xstab/attack.hpp"
#include "xstab/errors.hpp"

namespace xstab {

namespace {

constexpr std::uint64_t kGaStream = 0x67656e65746963ULL;  // rng stream tag

// Fitness: lower similarity first, then fewer perturbations, then a token
// hash so the order is total and runs are reproducible.
bool fitter(const Chromosome& l, const Chromosome& r) {
  if (l.similarity != r.similarity) return l.similarity < r.similarity;
  if (l.records.size() != r.records.size()) return l.records.size() < r.records.size();
  return hash_tokens(l.doc.tokens) < hash_tokens(r.doc.tokens);
}

Chromosome make_chromosome(const Document& doc, const AttackContext::Eval& eval,
                           std::vector<PerturbationRecord> records) {
  return Chromosome{doc, eval.explanation, eval.similarity, eval.report,
                    std::move(records)};
}

std::string gen_note(double best, std::size_t population) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "best=%.6f pop=%zu", best, population);
  return buf;
}

}  // namespace

Chromosome mutate(const Chromosome& parent, AttackContext& ctx, Rng& rng) {
  if (parent.doc.replaced.size() >= ctx.budget()) return parent;

  std::vector<std::size_t> candidates;
  candidates.reserve(ctx.perturbable_indices().size());
  for (std::size_t index : ctx.perturbable_indices()) {
    if (!parent.doc.replaced.contains(index)) candidates.push_back(index);
  }
  rng.shuffle(candidates);

  for (std::size_t index : candidates) {
    const std::string& word = ctx.base_doc().tokens[index];
    for (const auto& neighbor : ctx.neighbor_candidates(word)) {
      Document candidate = apply_replacement(parent.doc, index, neighbor.word);
      const AttackContext::Eval& eval = ctx.evaluate(candidate);
      if (!eval.report.accepts(ctx.config().strict_semantic)) continue;
      if (eval.similarity >= parent.similarity) continue;
      std::vector<PerturbationRecord> records = parent.records;
      records.push_back({index, word, neighbor.word, eval.similarity});
      return make_chromosome(candidate, eval, std::move(records));
    }
  }
  return parent;
}

Chromosome crossover(const Chromosome& p1, const Chromosome& p2, AttackContext& ctx,
                     Rng& rng) {
  const Document& base = ctx.base_doc();
  if (p1.doc.tokens.size() != p2.doc.tokens.size() ||
      p1.doc.tokens.size() != base.tokens.size()) {
    throw LineageError("crossover parents do not share the base document");
  }
  const std::size_t count = base.tokens.size();
  if (count < 2) {
    return rng.uniform_int(2) == 0 ? p1 : p2;
  }
  std::size_t cut = 1 + static_cast<std::size_t>(rng.uniform_int(count - 1));

  Document child;
  child.raw = base.raw;
  child.tokens.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    child.tokens.push_back(i < cut ? p1.doc.tokens[i] : p2.doc.tokens[i]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (child.tokens[i] != base.tokens[i]) {
      child.replaced.emplace(i, Replacement{base.tokens[i], child.tokens[i]});
    }
  }

  std::vector<PerturbationRecord> records;
  for (const auto& rec : p1.records) {
    if (rec.index < cut) records.push_back(rec);
  }
  for (const auto& rec : p2.records) {
    if (rec.index >= cut) records.push_back(rec);
  }

  const AttackContext::Eval& eval = ctx.evaluate(child);
  if (!eval.report.accepts(ctx.config().strict_semantic)) {
    return rng.uniform_int(2) == 0 ? p1 : p2;
  }
  return make_chromosome(child, eval, std::move(records));
}

AttackOutcome genetic_attack(const TextClassifier& model, const EmbeddingStore& store,
                             const Document& base, const AttackConfig& cfg) {
  AttackContext ctx(model, store, base, cfg);
  Rng rng(mix_seed(cfg.seed, kGaStream));
  AttackOutcome outcome;
  int step = 0;

  const AttackContext::Eval& base_eval = ctx.evaluate(base);
  Chromosome origin = make_chromosome(base, base_eval, {});

  std::vector<Chromosome> population;
  population.reserve(static_cast<std::size_t>(cfg.ga_population));
  Chromosome best = origin;
  for (int i = 0; i < cfg.ga_population; ++i) {
    Chromosome mutant = mutate(origin, ctx, rng);
    if (fitter(mutant, best)) best = mutant;
    population.push_back(std::move(mutant));
  }
  outcome.generations.push_back(
      {0, best.similarity, static_cast<int>(population.size())});
  outcome.transcript.push_back({++step, "generation", 0, "", "", best.similarity,
                                gen_note(best.similarity, population.size())});

  for (int gen = 1; gen <= cfg.ga_generations; ++gen) {
    if (best.similarity <= cfg.tau) break;

    std::sort(population.begin(), population.end(), fitter);
    const std::size_t survivors = population.size() / 2;
    population.resize(survivors);

    // The global best is checked after every child so a mid-generation hit
    // ends the search without breeding out the rest of the generation.
    bool reached_tau = false;
    std::vector<Chromosome> children;
    children.reserve(static_cast<std::size_t>(cfg.ga_population));
    for (int c = 0; c < cfg.ga_population && !reached_tau; ++c) {
      std::size_t first = static_cast<std::size_t>(rng.uniform_int(survivors));
      std::size_t second = first;
      if (survivors > 1) {
        second = static_cast<std::size_t>(rng.uniform_int(survivors - 1));
        if (second >= first) ++second;
      }
      Chromosome child = crossover(population[first], population[second], ctx, rng);
      if (fitter(child, best)) best = child;
      if (best.similarity <= cfg.tau) {
        reached_tau = true;
        break;
      }
      child = mutate(child, ctx, rng);
      if (fitter(child, best)) best = child;
      reached_tau = best.similarity <= cfg.tau;
      children.push_back(std::move(child));
    }
    if (reached_tau) break;  // partial child sets never become a generation
    population = std::move(children);
    outcome.generations.push_back(
        {gen, best.similarity, static_cast<int>(population.size())});
    outcome.transcript.push_back({++step, "generation", gen, "", "",
                                  best.similarity,
                                  gen_note(best.similarity, population.size())});
  }

  outcome.final_doc = best.doc;
  outcome.final_similarity = best.similarity;
  outcome.success = best.similarity <= cfg.tau;
  outcome.perturbations = best.records;
  outcome.semantic_ok = ctx.semantic_check(best.doc);
  outcome.queries = ctx.queries();
  outcome.explain_calls = ctx.explain_calls();
  for (const auto& rec : best.records) {
    outcome.transcript.push_back({++step, "replacement", static_cast<int>(rec.index),
                                  rec.old_word, rec.new_word, rec.similarity_after,
                                  ""});
  }
  outcome.transcript.push_back({++step, "result", -1, "", "", best.similarity,
                                outcome.success ? "success" : "failure"});
  return outcome;
}

}  // namespace xstab
