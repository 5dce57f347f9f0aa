#include "xstab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "xstab/csv.hpp"
#include "xstab/data_gen.hpp"
#include "xstab/errors.hpp"
#include "xstab/rng.hpp"

namespace xstab {

namespace {

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_tau(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", tau);
  return buf;
}

std::string format_two(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    std::size_t begin = item.find_first_not_of(" \t");
    std::size_t end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) continue;
    out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

double parse_number(const std::string& value, const std::string& key,
                    const std::string& origin) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw FormatError(origin + ": key '" + key + "' expects a number, got '" +
                      value + "'");
  }
}

long parse_integer(const std::string& value, const std::string& key,
                   const std::string& origin) {
  double v = parse_number(value, key, origin);
  double intpart;
  if (std::modf(v, &intpart) != 0.0) {
    throw FormatError(origin + ": key '" + key + "' expects an integer, got '" +
                      value + "'");
  }
  return static_cast<long>(intpart);
}

bool parse_flag(const std::string& value, const std::string& key,
                const std::string& origin) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw FormatError(origin + ": key '" + key + "' expects true/false, got '" +
                    value + "'");
}

std::uint64_t run_seed(std::uint64_t master, const std::string& dataset,
                       Measure measure, double tau, int example) {
  // Search kind is deliberately absent: greedy and genetic runs of the same
  // cell must see identical explanation seeds for identical candidates.
  std::string key = dataset;
  key += '|';
  key += measure_name(measure);
  key += '|';
  key += format_tau(tau);
  key += '|';
  key += std::to_string(example);
  return mix_seed(master, hash_tokens({key}));
}

}  // namespace

std::string_view search_label(SearchKind kind) {
  return kind == SearchKind::kGreedy ? "GS" : "GA";
}

std::optional<SearchKind> parse_search(std::string_view name) {
  if (name == "GS" || name == "gs" || name == "greedy") return SearchKind::kGreedy;
  if (name == "GA" || name == "ga" || name == "genetic") return SearchKind::kGenetic;
  return std::nullopt;
}

void RunMatrix::validate() const {
  if (datasets.empty()) throw ParameterError("run matrix needs at least one dataset");
  if (measures.empty()) throw ParameterError("run matrix needs at least one measure");
  if (thresholds.empty()) throw ParameterError("run matrix needs thresholds");
  for (double tau : thresholds) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw ParameterError("threshold " + format_full(tau) + " outside (0, 1)");
    }
  }
  if (searches.empty()) throw ParameterError("run matrix needs at least one search");
  if (examples_per_cell < 1) throw ParameterError("examples_per_cell must be >= 1");
}

std::vector<LabeledText> resolve_dataset(const DatasetRef& ref) {
  if (ref.source == "builtin") {
    if (ref.name == "short") return builtin_short_corpus();
    if (ref.name == "medium") return builtin_medium_corpus();
    throw ParameterError("unknown builtin dataset '" + ref.name + "'");
  }
  return load_corpus_csv(ref.source);
}

std::vector<int> select_examples(const std::vector<LabeledText>& corpus, int count) {
  std::vector<int> selected;
  for (std::size_t i = 0; i < corpus.size() &&
                          selected.size() < static_cast<std::size_t>(count);
       ++i) {
    Document doc = tokenize(corpus[i].text);
    if (distinct_feature_words(doc).size() >= 2) {
      selected.push_back(static_cast<int>(i));
    }
  }
  return selected;
}

std::vector<RunRecord> run_matrix(const RunMatrix& matrix, const TextClassifier& model,
                                  const EmbeddingStore& store,
                                  const std::function<void(std::size_t, std::size_t)>&
                                      progress) {
  matrix.validate();

  struct PlannedRun {
    std::string dataset;
    Measure measure;
    double tau;
    SearchKind search;
    int example;
    int text_id;
    Document doc;
    std::uint64_t seed;
  };
  std::vector<PlannedRun> plan;
  for (const auto& ref : matrix.datasets) {
    auto corpus = resolve_dataset(ref);
    auto examples = select_examples(corpus, matrix.examples_per_cell);
    for (Measure measure : matrix.measures) {
      for (double tau : matrix.thresholds) {
        for (SearchKind search : matrix.searches) {
          for (std::size_t e = 0; e < examples.size(); ++e) {
            PlannedRun run;
            run.dataset = ref.name;
            run.measure = measure;
            run.tau = tau;
            run.search = search;
            run.example = static_cast<int>(e);
            run.text_id = examples[e];
            run.doc = tokenize(corpus[examples[e]].text);
            run.seed = run_seed(matrix.master_seed, ref.name, measure, tau,
                                static_cast<int>(e));
            plan.push_back(std::move(run));
          }
        }
      }
    }
  }

  std::vector<RunRecord> records(plan.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      const PlannedRun& run = plan[i];

      AttackConfig cfg = matrix.defaults;
      cfg.measure = run.measure;
      cfg.tau = run.tau;
      cfg.seed = run.seed;

      RunRecord rec;
      rec.dataset = run.dataset;
      rec.measure = run.measure;
      rec.tau = run.tau;
      rec.search = run.search;
      rec.example = run.example;
      rec.text_id = run.text_id;
      rec.content_tokens = non_punct_token_count(run.doc);
      rec.seed = run.seed;
      auto attack_start = std::chrono::steady_clock::now();
      rec.outcome = run.search == SearchKind::kGreedy
                        ? greedy_attack(model, store, run.doc, cfg)
                        : genetic_attack(model, store, run.doc, cfg);
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                  attack_start)
                        .count();
      records[i] = std::move(rec);
      std::size_t finished = done.fetch_add(1) + 1;
      if (progress) progress(finished, plan.size());
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  std::size_t thread_count = matrix.threads > 0 ? static_cast<std::size_t>(matrix.threads)
                                                : (hw ? hw : 1);
  thread_count = std::min(thread_count, plan.size() ? plan.size() : std::size_t{1});
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return records;
}

CellStats aggregate(const std::vector<OutcomeSummary>& outcomes) {
  if (outcomes.empty()) throw EmptyInputError("aggregate over zero outcomes");
  CellStats stats;
  stats.total = static_cast<int>(outcomes.size());
  double similarity_sum = 0.0;
  double rate_sum = 0.0;
  long min_perturbations = 0;
  for (const auto& outcome : outcomes) {
    if (!outcome.success) continue;
    ++stats.successes;
    similarity_sum += outcome.final_similarity;
    rate_sum += static_cast<double>(outcome.perturbations) /
                static_cast<double>(outcome.content_tokens);
    long count = static_cast<long>(outcome.perturbations);
    if (stats.successes == 1 || count < min_perturbations) min_perturbations = count;
  }
  stats.success_rate = static_cast<double>(stats.successes) /
                       static_cast<double>(stats.total);
  if (stats.successes > 0) {
    stats.mean_similarity = similarity_sum / stats.successes;
    stats.avg_perturbation_rate = rate_sum / stats.successes;
    stats.min_perturbations = min_perturbations;
  }
  return stats;
}

CellStats aggregate(const std::vector<AttackOutcome>& outcomes) {
  std::vector<OutcomeSummary> summaries;
  summaries.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    summaries.push_back({outcome.success, outcome.final_similarity,
                         outcome.perturbations.size(),
                         non_punct_token_count(outcome.final_doc)});
  }
  return aggregate(summaries);
}

void write_summary_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write summary: " + path);
  out << "dataset,measure,tau,search,example,text_id,success,final_similarity,"
         "perturbations,content_tokens,perturbation_rate,queries,explain_calls,"
         "semantic_ok,seed\n";
  for (const auto& rec : records) {
    double rate = static_cast<double>(rec.outcome.perturbations.size()) /
                  static_cast<double>(rec.content_tokens);
    std::vector<std::string> fields = {
        rec.dataset,
        std::string(measure_name(rec.measure)),
        format_tau(rec.tau),
        std::string(search_label(rec.search)),
        std::to_string(rec.example),
        std::to_string(rec.text_id),
        rec.outcome.success ? "1" : "0",
        format_full(rec.outcome.final_similarity),
        std::to_string(rec.outcome.perturbations.size()),
        std::to_string(rec.content_tokens),
        format_full(rate),
        std::to_string(rec.outcome.queries),
        std::to_string(rec.outcome.explain_calls),
        rec.outcome.semantic_ok ? "1" : "0",
        std::to_string(rec.seed),
    };
    out << csv::join_row(fields) << '\n';
  }
  if (!out) throw IoError("failed writing summary: " + path);
}

void write_steps_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write steps: " + path);
  out << "dataset,measure,tau,search,example,step,event,index,old_word,new_word,"
         "similarity,note\n";
  for (const auto& rec : records) {
    for (const auto& step : rec.outcome.transcript) {
      std::vector<std::string> fields = {
          rec.dataset,
          std::string(measure_name(rec.measure)),
          format_tau(rec.tau),
          std::string(search_label(rec.search)),
          std::to_string(rec.example),
          std::to_string(step.step),
          step.event,
          std::to_string(step.index),
          step.old_word,
          step.new_word,
          format_full(step.similarity),
          step.note,
      };
      out << csv::join_row(fields) << '\n';
    }
  }
  if (!out) throw IoError("failed writing steps: " + path);
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw IngestionError(path + ":1: empty summary file");
  std::vector<SummaryRow> out;
  out.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 15) {
      throw IngestionError(path + ":" + std::to_string(i + 1) +
                           ": expected 15 fields, got " + std::to_string(row.size()));
    }
    SummaryRow rec;
    rec.dataset = row[0];
    auto measure = parse_measure(row[1]);
    if (!measure) {
      throw IngestionError(path + ":" + std::to_string(i + 1) +
                           ": unknown measure '" + row[1] + "'");
    }
    rec.measure = *measure;
    rec.tau = std::stod(row[2]);
    auto search = parse_search(row[3]);
    if (!search) {
      throw IngestionError(path + ":" + std::to_string(i + 1) +
                           ": unknown search '" + row[3] + "'");
    }
    rec.search = *search;
    rec.example = std::stoi(row[4]);
    rec.text_id = std::stoi(row[5]);
    rec.success = row[6] == "1";
    rec.final_similarity = std::stod(row[7]);
    rec.perturbations = static_cast<std::size_t>(std::stoul(row[8]));
    rec.content_tokens = static_cast<std::size_t>(std::stoul(row[9]));
    rec.perturbation_rate = std::stod(row[10]);
    rec.queries = std::stol(row[11]);
    rec.explain_calls = std::stol(row[12]);
    rec.semantic_ok = row[13] == "1";
    rec.seed = std::stoull(row[14]);
    out.push_back(std::move(rec));
  }
  return out;
}

ReportStats build_report_stats(const std::vector<SummaryRow>& rows) {
  std::map<CellKey, std::vector<OutcomeSummary>> cells;
  for (const auto& row : rows) {
    cells[{row.dataset, row.tau, row.measure, row.search}].push_back(
        {row.success, row.final_similarity, row.perturbations, row.content_tokens});
  }
  ReportStats stats;
  for (auto& [key, outcomes] : cells) stats.emplace(key, aggregate(outcomes));
  return stats;
}

ReportStats build_report_stats(const std::vector<RunRecord>& records) {
  std::map<CellKey, std::vector<OutcomeSummary>> cells;
  for (const auto& rec : records) {
    cells[{rec.dataset, rec.tau, rec.measure, rec.search}].push_back(
        {rec.outcome.success, rec.outcome.final_similarity,
         rec.outcome.perturbations.size(), rec.content_tokens});
  }
  ReportStats stats;
  for (auto& [key, outcomes] : cells) stats.emplace(key, aggregate(outcomes));
  return stats;
}

namespace {

struct ReportAxes {
  std::vector<std::string> datasets;
  std::vector<double> thresholds;
  std::vector<Measure> measures;
  std::vector<SearchKind> searches;  // GA before GS, as in the tables
};

ReportAxes collect_axes(const ReportStats& stats) {
  ReportAxes axes;
  for (const auto& [key, value] : stats) {
    if (std::find(axes.datasets.begin(), axes.datasets.end(), key.dataset) ==
        axes.datasets.end()) {
      axes.datasets.push_back(key.dataset);
    }
    if (std::find(axes.thresholds.begin(), axes.thresholds.end(), key.tau) ==
        axes.thresholds.end()) {
      axes.thresholds.push_back(key.tau);
    }
  }
  std::sort(axes.thresholds.begin(), axes.thresholds.end());
  for (Measure m : kAllMeasures) {
    for (const auto& [key, value] : stats) {
      if (key.measure == m) {
        axes.measures.push_back(m);
        break;
      }
    }
  }
  for (SearchKind s : {SearchKind::kGenetic, SearchKind::kGreedy}) {
    for (const auto& [key, value] : stats) {
      if (key.search == s) {
        axes.searches.push_back(s);
        break;
      }
    }
  }
  return axes;
}

enum class Statistic { kSuccessRate, kMeanSimilarity, kPerturbationRate, kMinPerturbations };

constexpr std::array<Statistic, 4> kStatistics = {
    Statistic::kSuccessRate, Statistic::kMeanSimilarity,
    Statistic::kPerturbationRate, Statistic::kMinPerturbations};

std::string_view statistic_title(Statistic s) {
  switch (s) {
    case Statistic::kSuccessRate: return "Attack success rate";
    case Statistic::kMeanSimilarity: return "Mean similarity (successful attacks)";
    case Statistic::kPerturbationRate:
      return "Average perturbation rate (successful attacks)";
    case Statistic::kMinPerturbations:
      return "Minimum perturbations (successful attacks)";
  }
  return "";
}

// "-" when the statistic is absent (no successful attack in the cell).
std::string statistic_value(const CellStats& stats, Statistic s) {
  switch (s) {
    case Statistic::kSuccessRate:
      return format_two(stats.success_rate);
    case Statistic::kMeanSimilarity:
      return stats.mean_similarity ? format_two(*stats.mean_similarity) : "-";
    case Statistic::kPerturbationRate:
      return stats.avg_perturbation_rate ? format_two(*stats.avg_perturbation_rate)
                                         : "-";
    case Statistic::kMinPerturbations:
      return stats.min_perturbations ? std::to_string(*stats.min_perturbations) : "-";
  }
  return "-";
}

std::string render_markdown(const ReportStats& stats, const ReportAxes& axes) {
  std::string out;
  for (Statistic statistic : kStatistics) {
    out += "## ";
    out += statistic_title(statistic);
    out += "\n\n";
    out += "| dataset | tau |";
    for (Measure m : axes.measures) {
      for (SearchKind s : axes.searches) {
        out += " ";
        out += measure_name(m);
        out += " ";
        out += search_label(s);
        out += " |";
      }
    }
    out += "\n|---|---|";
    for (std::size_t i = 0; i < axes.measures.size() * axes.searches.size(); ++i) {
      out += "---|";
    }
    out += "\n";
    for (const auto& dataset : axes.datasets) {
      for (double tau : axes.thresholds) {
        out += "| " + dataset + " | " + format_tau(tau) + " |";
        for (Measure m : axes.measures) {
          for (SearchKind s : axes.searches) {
            auto it = stats.find({dataset, tau, m, s});
            out += " ";
            out += it == stats.end() ? "-" : statistic_value(it->second, statistic);
            out += " |";
          }
        }
        out += "\n";
      }
    }
    out += "\n";
  }
  return out;
}

std::string render_csv(const ReportStats& stats, const ReportAxes& axes) {
  std::string out =
      "dataset,tau,measure,search,success_rate,mean_similarity,"
      "avg_perturbation_rate,min_perturbations\n";
  for (const auto& dataset : axes.datasets) {
    for (double tau : axes.thresholds) {
      for (Measure m : axes.measures) {
        for (SearchKind s : axes.searches) {
          auto it = stats.find({dataset, tau, m, s});
          if (it == stats.end()) continue;
          const CellStats& cell = it->second;
          out += dataset + "," + format_tau(tau) + "," +
                 std::string(measure_name(m)) + "," +
                 std::string(search_label(s)) + "," +
                 format_two(cell.success_rate) + ",";
          out += cell.mean_similarity ? format_two(*cell.mean_similarity) : "";
          out += ",";
          out += cell.avg_perturbation_rate ? format_two(*cell.avg_perturbation_rate)
                                            : "";
          out += ",";
          out += cell.min_perturbations ? std::to_string(*cell.min_perturbations) : "";
          out += "\n";
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string render_report(const ReportStats& stats, ReportFormat format) {
  if (stats.empty()) throw EmptyInputError("no cells to report");
  ReportAxes axes = collect_axes(stats);
  return format == ReportFormat::kMarkdown ? render_markdown(stats, axes)
                                           : render_csv(stats, axes);
}

void write_report(const ReportStats& stats, const std::string& path,
                  ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report: " + path);
  out << render_report(stats, format);
  if (!out) throw IoError("failed writing report: " + path);
}

RunMatrix parse_experiment_config(const std::string& text, const std::string& origin) {
  RunMatrix matrix;
  matrix.datasets = {{"short", "builtin"}, {"medium", "builtin"}};

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      std::size_t e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string where = origin + ":" + std::to_string(line_no);

    if (key == "datasets") {
      matrix.datasets.clear();
      for (const auto& item : split_list(value)) {
        std::size_t sep = item.find('=');
        if (sep == std::string::npos) {
          matrix.datasets.push_back({item, "builtin"});
        } else {
          matrix.datasets.push_back({item.substr(0, sep), item.substr(sep + 1)});
        }
      }
    } else if (key == "embeddings") {
      matrix.embeddings = value;
    } else if (key == "measures") {
      matrix.measures.clear();
      if (value == "all") {
        matrix.measures.assign(kAllMeasures.begin(), kAllMeasures.end());
      } else {
        for (const auto& item : split_list(value)) {
          auto measure = parse_measure(item);
          if (!measure) {
            throw FormatError(where + ": unknown measure '" + item + "'");
          }
          matrix.measures.push_back(*measure);
        }
      }
    } else if (key == "thresholds") {
      matrix.thresholds.clear();
      for (const auto& item : split_list(value)) {
        matrix.thresholds.push_back(parse_number(item, key, where));
      }
    } else if (key == "searches") {
      matrix.searches.clear();
      for (const auto& item : split_list(value)) {
        auto search = parse_search(item);
        if (!search) throw FormatError(where + ": unknown search '" + item + "'");
        matrix.searches.push_back(*search);
      }
    } else if (key == "examples_per_cell") {
      matrix.examples_per_cell = static_cast<int>(parse_integer(value, key, where));
    } else if (key == "seed") {
      matrix.master_seed = static_cast<std::uint64_t>(parse_integer(value, key, where));
    } else if (key == "epsilon") {
      matrix.defaults.epsilon = parse_number(value, key, where);
    } else if (key == "delta") {
      matrix.defaults.delta = parse_number(value, key, where);
    } else if (key == "topk") {
      matrix.defaults.top_k = static_cast<int>(parse_integer(value, key, where));
    } else if (key == "neighbors") {
      matrix.defaults.neighbors = static_cast<int>(parse_integer(value, key, where));
    } else if (key == "min_cos") {
      matrix.defaults.min_cos = parse_number(value, key, where);
    } else if (key == "population") {
      matrix.defaults.ga_population = static_cast<int>(parse_integer(value, key, where));
    } else if (key == "generations") {
      matrix.defaults.ga_generations = static_cast<int>(parse_integer(value, key, where));
    } else if (key == "samples") {
      matrix.defaults.explainer.samples = static_cast<int>(parse_integer(value, key, where));
    } else if (key == "mask_rate") {
      matrix.defaults.explainer.mask_rate = parse_number(value, key, where);
    } else if (key == "max_features") {
      matrix.defaults.explainer.max_features =
          static_cast<int>(parse_integer(value, key, where));
    } else if (key == "kernel_width") {
      matrix.defaults.explainer.kernel_width = parse_number(value, key, where);
    } else if (key == "strict_semantic") {
      matrix.defaults.strict_semantic = parse_flag(value, key, where);
    } else if (key == "threads") {
      matrix.threads = static_cast<int>(parse_integer(value, key, where));
    } else {
      throw FormatError(where + ": unknown config key '" + key + "'");
    }
  }
  matrix.validate();
  return matrix;
}

RunMatrix load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), path);
}

std::vector<RunRecord> run_experiment(const RunMatrix& matrix, const std::string& out_dir,
                                      const std::function<void(std::size_t, std::size_t)>&
                                          progress) {
  matrix.validate();

  std::vector<LabeledText> training;
  for (const auto& ref : matrix.datasets) {
    auto corpus = resolve_dataset(ref);
    training.insert(training.end(), corpus.begin(), corpus.end());
  }
  BowClassifier model = train_bow(training);

  EmbeddingStore store = matrix.embeddings == "builtin"
                             ? builtin_embeddings()
                             : load_embeddings(matrix.embeddings);

  auto records = run_matrix(matrix, model, store, progress);

  std::filesystem::create_directories(out_dir);
  auto path = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  write_summary_csv(records, path("summary.csv"));
  write_steps_csv(records, path("steps.csv"));
  return records;
}

}  // namespace xstab
