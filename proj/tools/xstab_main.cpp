// xstab: train a bag-of-words target model, explain predictions with a local
// surrogate, search for minimum viable explanation perturbations, and run the
// full experiment grid.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "xstab/attack.hpp"
#include "xstab/data_gen.hpp"
#include "xstab/errors.hpp"
#include "xstab/experiment.hpp"
#include "xstab/model.hpp"

namespace {

using namespace xstab;

EmbeddingStore open_embeddings(const std::string& source) {
  if (source == "builtin") return builtin_embeddings();
  EmbeddingLoadStats stats;
  EmbeddingStore store = load_embeddings(source, &stats);
  if (stats.duplicates_replaced > 0) {
    std::cerr << "warning: " << stats.duplicates_replaced
              << " duplicate embedding entries replaced\n";
  }
  return store;
}

int cmd_train(const std::string& corpus_path, const std::string& out_path,
              TrainParams params) {
  auto corpus = load_corpus_csv(corpus_path);
  std::vector<double> losses;
  BowClassifier model = train_bow(corpus, params, &losses);
  model.save(out_path);
  std::printf("trained on %zu examples, %zu classes, %zu vocabulary words\n",
              corpus.size(), model.classes().size(), model.vocabulary_size());
  std::printf("final training loss %.6f\n", losses.back());
  std::printf("model written to %s\n", out_path.c_str());
  return 0;
}

int cmd_explain(const std::string& model_path, const std::string& text,
                ExplainerParams params, std::uint64_t seed) {
  BowClassifier model = BowClassifier::load(model_path);
  Document doc = tokenize(text);
  Explanation explanation = explain(model, doc, params, seed);
  const std::string& label = model.classes()[explanation.target_class];
  std::printf("predicted class: %s\n", label.c_str());
  std::printf("%-4s %-16s %s\n", "rank", "feature", "weight");
  int rank = 1;
  for (const auto& feature : explanation.features) {
    std::printf("%-4d %-16s %+.6f\n", rank++, feature.word.c_str(), feature.weight);
  }
  return 0;
}

int cmd_attack(const std::string& model_path, const std::string& embeddings,
               const std::string& text, const std::string& search_name,
               AttackConfig cfg) {
  BowClassifier model = BowClassifier::load(model_path);
  EmbeddingStore store = open_embeddings(embeddings);
  Document doc = tokenize(text);
  auto search = parse_search(search_name);
  if (!search) throw ParameterError("unknown search '" + search_name + "'");

  AttackOutcome outcome = *search == SearchKind::kGreedy
                              ? greedy_attack(model, store, doc, cfg)
                              : genetic_attack(model, store, doc, cfg);

  std::printf("search: %s   measure: %s   tau: %.2f\n", search_name.c_str(),
              std::string(measure_name(cfg.measure)).c_str(), cfg.tau);
  std::printf("success: %s\n", outcome.success ? "yes" : "no");
  std::printf("final similarity: %.4f\n", outcome.final_similarity);
  std::printf("perturbations: %zu\n", outcome.perturbations.size());
  for (const auto& rec : outcome.perturbations) {
    std::printf("  [%zu] %s -> %s   (similarity %.4f)\n", rec.index,
                rec.old_word.c_str(), rec.new_word.c_str(), rec.similarity_after);
  }
  std::printf("semantic check: %s\n", outcome.semantic_ok ? "pass" : "fail");
  std::printf("model queries: %ld   explanations: %ld\n", outcome.queries,
              outcome.explain_calls);
  std::printf("perturbed text: %s\n", outcome.final_doc.surface().c_str());
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
  RunMatrix matrix = load_experiment_config(config_path);
  std::size_t last_percent = 101;
  auto records = run_experiment(matrix, out_dir,
                                [&](std::size_t done, std::size_t total) {
                                  std::size_t percent = done * 100 / total;
                                  if (percent != last_percent && percent % 5 == 0) {
                                    last_percent = percent;
                                    std::fprintf(stderr, "\r%3zu%% (%zu/%zu)", percent,
                                                 done, total);
                                    if (done == total) std::fprintf(stderr, "\n");
                                  }
                                });
  std::printf("%zu attacks complete; summary.csv and steps.csv written to %s\n",
              records.size(), out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& runs_dir, const std::string& format_name,
               const std::string& out_path) {
  auto rows = read_summary_csv(
      (std::filesystem::path(runs_dir) / "summary.csv").string());
  ReportStats stats = build_report_stats(rows);
  ReportFormat format =
      format_name == "markdown" ? ReportFormat::kMarkdown : ReportFormat::kCsv;
  std::string rendered = render_report(stats, format);
  if (out_path.empty()) {
    std::fputs(rendered.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + out_path);
    out << rendered;
    std::printf("report written to %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_gen_data(const std::string& out_dir) {
  write_builtin_data(out_dir);
  std::printf("wrote short.csv, medium.csv, embeddings.txt to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explanation stability toolkit: minimum viable perturbation "
               "search against local surrogate explanations"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train the bag-of-words classifier");
  std::string corpus_path, model_out;
  TrainParams train_params;
  train->add_option("--corpus", corpus_path, "Corpus CSV (text,label)")->required();
  train->add_option("--out", model_out, "Output model path")->required();
  train->add_option("--epochs", train_params.epochs, "Training epochs");
  train->add_option("--lr", train_params.learning_rate, "Learning rate");
  train->add_option("--l2", train_params.l2, "L2 penalty");

  // explain
  auto* explain_cmd = app.add_subcommand("explain", "Explain one prediction");
  std::string explain_model, explain_text;
  ExplainerParams explain_params;
  std::uint64_t explain_seed = 0;
  explain_cmd->add_option("--model", explain_model, "Model file")->required();
  explain_cmd->add_option("--text", explain_text, "Text to explain")->required();
  explain_cmd->add_option("--seed", explain_seed, "Sampling seed");
  explain_cmd->add_option("--samples", explain_params.samples, "Masked samples");
  explain_cmd->add_option("--mask-rate", explain_params.mask_rate, "Mask rate");
  explain_cmd->add_option("--features", explain_params.max_features, "Max features");
  explain_cmd->add_option("--kernel-width", explain_params.kernel_width, "Kernel width");

  // attack
  auto* attack_cmd = app.add_subcommand("attack", "Perturb one document");
  std::string attack_model, attack_embeddings, attack_text, attack_measure;
  std::string attack_search = "greedy";
  AttackConfig attack_cfg;
  attack_cmd->add_option("--model", attack_model, "Model file")->required();
  attack_cmd->add_option("--embeddings", attack_embeddings,
                         "Embedding file, or 'builtin'")->required();
  attack_cmd->add_option("--measure", attack_measure, "Similarity measure")->required();
  attack_cmd->add_option("--tau", attack_cfg.tau, "Success threshold")->required();
  attack_cmd->add_option("--search", attack_search, "greedy|genetic")->required();
  attack_cmd->add_option("--text", attack_text, "Document to perturb")->required();
  attack_cmd->add_option("--epsilon", attack_cfg.epsilon, "Max perturbed fraction");
  attack_cmd->add_option("--delta", attack_cfg.delta, "Semantic floor");
  attack_cmd->add_option("--topk", attack_cfg.top_k, "Protected features");
  attack_cmd->add_option("--seed", attack_cfg.seed, "Attack seed");
  attack_cmd->add_option("--population", attack_cfg.ga_population, "GA population");
  attack_cmd->add_option("--generations", attack_cfg.ga_generations, "GA generations");
  attack_cmd->add_option("--neighbors", attack_cfg.neighbors, "Candidates per word");
  attack_cmd->add_option("--min-cos", attack_cfg.min_cos, "Neighbor cosine floor");
  attack_cmd->add_option("--samples", attack_cfg.explainer.samples, "Masked samples");
  attack_cmd->add_flag("--strict-semantic", attack_cfg.strict_semantic,
                       "Veto candidates that fail the semantic check");

  // experiment
  auto* experiment_cmd = app.add_subcommand("experiment", "Run the full grid");
  std::string config_path, experiment_out;
  experiment_cmd->add_option("--config", config_path, "Config file")->required();
  experiment_cmd->add_option("--out", experiment_out, "Output directory")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "Aggregate a run directory");
  std::string runs_dir, report_format = "markdown", report_out;
  report_cmd->add_option("--runs", runs_dir, "Run directory")->required();
  report_cmd->add_option("--format", report_format, "csv|markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  report_cmd->add_option("--out", report_out, "Output file (default stdout)");

  // gen-data
  auto* gen_cmd = app.add_subcommand("gen-data", "Write the bundled corpora");
  std::string gen_out = "data";
  gen_cmd->add_option("--out", gen_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*train) return cmd_train(corpus_path, model_out, train_params);
    if (*explain_cmd) {
      return cmd_explain(explain_model, explain_text, explain_params, explain_seed);
    }
    if (*attack_cmd) {
      auto measure = parse_measure(attack_measure);
      if (!measure) throw ParameterError("unknown measure '" + attack_measure + "'");
      attack_cfg.measure = *measure;
      return cmd_attack(attack_model, attack_embeddings, attack_text, attack_search,
                        attack_cfg);
    }
    if (*experiment_cmd) return cmd_experiment(config_path, experiment_out);
    if (*report_cmd) return cmd_report(runs_dir, report_format, report_out);
    if (*gen_cmd) return cmd_gen_data(gen_out);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IngestionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
