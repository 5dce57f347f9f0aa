#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xstab/attack.hpp"
#include "xstab/model.hpp"
#include "xstab/rank_sim.hpp"

namespace xstab {

enum class SearchKind { kGreedy, kGenetic };

/// Report/table label: greedy is "GS", genetic is "GA".
std::string_view search_label(SearchKind kind);
std::optional<SearchKind> parse_search(std::string_view name);

struct DatasetRef {
  std::string name;
  std::string source;  // "builtin" or a CSV path
};

/// The full experiment grid. Attacks run for every
/// (dataset, measure, threshold, search, example) combination; greedy and
/// genetic runs of the same cell share per-example seeds so their similarity
/// values are directly comparable.
struct RunMatrix {
  std::vector<DatasetRef> datasets;
  std::vector<Measure> measures{kAllMeasures.begin(), kAllMeasures.end()};
  std::vector<double> thresholds{0.30, 0.40, 0.50, 0.60};
  std::vector<SearchKind> searches{SearchKind::kGreedy, SearchKind::kGenetic};
  int examples_per_cell = 20;
  std::uint64_t master_seed = 42;
  AttackConfig defaults;      // measure/tau/seed are overwritten per run
  std::string embeddings = "builtin";  // or a file path
  int threads = 0;            // 0 = hardware concurrency

  void validate() const;  // throws ParameterError
};

struct RunRecord {
  std::string dataset;
  Measure measure = Measure::kRbo05;
  double tau = 0.0;
  SearchKind search = SearchKind::kGreedy;
  int example = 0;      // position within the cell
  int text_id = 0;      // row in the source corpus
  std::size_t content_tokens = 0;  // non-punctuation tokens of the base doc
  std::uint64_t seed = 0;
  double seconds = 0.0;  // wall time of this attack; not persisted
  AttackOutcome outcome;
};

/// Resolves "builtin" names or loads a CSV corpus.
std::vector<LabeledText> resolve_dataset(const DatasetRef& ref);

/// The first `count` documents of a corpus that are attackable (at least two
/// distinct non-punctuation words). Returns corpus row indices.
std::vector<int> select_examples(const std::vector<LabeledText>& corpus, int count);

/// Runs the whole grid against one trained model and one embedding store.
/// Deterministic for a fixed master seed regardless of thread count.
std::vector<RunRecord> run_matrix(const RunMatrix& matrix, const TextClassifier& model,
                                  const EmbeddingStore& store,
                                  const std::function<void(std::size_t, std::size_t)>&
                                      progress = nullptr);

/// One table cell, aggregated over a cell's outcomes. The three
/// successful-only statistics are absent exactly when nothing succeeded.
struct CellStats {
  int total = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> mean_similarity;
  std::optional<double> avg_perturbation_rate;
  std::optional<long> min_perturbations;
};

struct OutcomeSummary {
  bool success = false;
  double final_similarity = 1.0;
  std::size_t perturbations = 0;
  std::size_t content_tokens = 0;
};

CellStats aggregate(const std::vector<OutcomeSummary>& outcomes);
CellStats aggregate(const std::vector<AttackOutcome>& outcomes);

struct CellKey {
  std::string dataset;
  double tau = 0.0;
  Measure measure = Measure::kRbo05;
  SearchKind search = SearchKind::kGreedy;

  auto operator<=>(const CellKey&) const = default;
};

using ReportStats = std::map<CellKey, CellStats>;

/// Parsed row of a persisted summary.csv.
struct SummaryRow {
  std::string dataset;
  Measure measure = Measure::kRbo05;
  double tau = 0.0;
  SearchKind search = SearchKind::kGreedy;
  int example = 0;
  int text_id = 0;
  bool success = false;
  double final_similarity = 1.0;
  std::size_t perturbations = 0;
  std::size_t content_tokens = 0;
  double perturbation_rate = 0.0;
  long queries = 0;
  long explain_calls = 0;
  bool semantic_ok = false;
  std::uint64_t seed = 0;
};

void write_summary_csv(const std::vector<RunRecord>& records, const std::string& path);
void write_steps_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

ReportStats build_report_stats(const std::vector<SummaryRow>& rows);
ReportStats build_report_stats(const std::vector<RunRecord>& records);

enum class ReportFormat { kCsv, kMarkdown };

/// Four tables (success rate, mean similarity, average perturbation rate,
/// minimum perturbations); thresholds as rows, measures as column groups
/// with paired GA/GS columns. Absent statistics render as "-" in markdown
/// and as empty CSV fields. Two decimals throughout, integers for minimum
/// perturbations.
std::string render_report(const ReportStats& stats, ReportFormat format);
void write_report(const ReportStats& stats, const std::string& path,
                  ReportFormat format);

/// Line-oriented `key = value` configuration with `#` comments. Unknown keys
/// raise FormatError naming the key.
RunMatrix parse_experiment_config(const std::string& text, const std::string& origin);
RunMatrix load_experiment_config(const std::string& path);

/// End-to-end experiment: resolve datasets, train the bundled classifier on
/// their union, load embeddings, run the grid, and persist summary.csv and
/// steps.csv under out_dir.
std::vector<RunRecord> run_experiment(const RunMatrix& matrix, const std::string& out_dir,
                                      const std::function<void(std::size_t, std::size_t)>&
                                          progress = nullptr);

}  // namespace xstab
