#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xstab/csv.hpp"
#include "xstab/data_gen.hpp"
#include "xstab/errors.hpp"
#include "xstab/experiment.hpp"

using namespace xstab;

namespace {

RunMatrix tiny_matrix() {
  RunMatrix matrix;
  matrix.datasets = {{"short", "builtin"}};
  matrix.measures = {Measure::kJaccard};
  matrix.thresholds = {0.5};
  matrix.searches = {SearchKind::kGreedy, SearchKind::kGenetic};
  matrix.examples_per_cell = 2;
  matrix.master_seed = 7;
  matrix.defaults.explainer.samples = 40;
  matrix.threads = 2;
  return matrix;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("run_matrix cardinality: measures x thresholds x searches x examples") {
  RunMatrix matrix = tiny_matrix();
  BowClassifier model = train_bow(builtin_short_corpus());
  EmbeddingStore store = builtin_embeddings();
  auto records = run_matrix(matrix, model, store);
  CHECK(records.size() == 1 * 1 * 2 * 2);

  int greedy = 0, genetic = 0;
  for (const auto& rec : records) {
    if (rec.search == SearchKind::kGreedy) ++greedy;
    else ++genetic;
  }
  CHECK(greedy == 2);
  CHECK(genetic == 2);
}

TEST_CASE("greedy and genetic runs of one cell share seeds") {
  RunMatrix matrix = tiny_matrix();
  BowClassifier model = train_bow(builtin_short_corpus());
  EmbeddingStore store = builtin_embeddings();
  auto records = run_matrix(matrix, model, store);
  for (const auto& a : records) {
    for (const auto& b : records) {
      if (a.dataset == b.dataset && a.measure == b.measure && a.tau == b.tau &&
          a.example == b.example) {
        CHECK(a.seed == b.seed);
      }
    }
  }
}

TEST_CASE("identical master seeds reproduce the whole result set") {
  RunMatrix matrix = tiny_matrix();
  BowClassifier model = train_bow(builtin_short_corpus());
  EmbeddingStore store = builtin_embeddings();

  auto first = run_matrix(matrix, model, store);
  matrix.threads = 1;  // thread count must not matter
  auto second = run_matrix(matrix, model, store);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].outcome.final_similarity == second[i].outcome.final_similarity);
    CHECK(first[i].outcome.success == second[i].outcome.success);
    CHECK(first[i].outcome.final_doc.tokens == second[i].outcome.final_doc.tokens);
    CHECK(first[i].seed == second[i].seed);
  }
}

TEST_CASE("aggregate arithmetic") {
  std::vector<OutcomeSummary> outcomes;
  for (int i = 0; i < 20; ++i) {
    OutcomeSummary s;
    s.success = i < 9;
    s.final_similarity = 0.4;
    s.perturbations = i < 3 ? std::size_t(2 + i * 2) : std::size_t(5);  // {2,4,6,...}
    s.content_tokens = 10;
    outcomes.push_back(s);
  }
  CellStats stats = aggregate(outcomes);
  CHECK(stats.total == 20);
  CHECK(stats.successes == 9);
  CHECK(stats.success_rate == 0.45);
  REQUIRE(stats.min_perturbations.has_value());
  CHECK(*stats.min_perturbations == 2);
  REQUIRE(stats.mean_similarity.has_value());
  CHECK(*stats.mean_similarity == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("aggregate with zero successes leaves statistics absent") {
  std::vector<OutcomeSummary> outcomes(5);
  for (auto& s : outcomes) {
    s.success = false;
    s.content_tokens = 10;
  }
  CellStats stats = aggregate(outcomes);
  CHECK(stats.success_rate == 0.0);
  CHECK_FALSE(stats.mean_similarity.has_value());
  CHECK_FALSE(stats.avg_perturbation_rate.has_value());
  CHECK_FALSE(stats.min_perturbations.has_value());
}

TEST_CASE("aggregate of min perturbations {2,4,7}") {
  std::vector<OutcomeSummary> outcomes;
  for (std::size_t count : {2u, 4u, 7u}) {
    OutcomeSummary s;
    s.success = true;
    s.final_similarity = 0.3;
    s.perturbations = count;
    s.content_tokens = 20;
    outcomes.push_back(s);
  }
  CHECK(*aggregate(outcomes).min_perturbations == 2);
}

TEST_CASE("aggregate rejects empty input") {
  CHECK_THROWS_AS(aggregate(std::vector<OutcomeSummary>{}), EmptyInputError);
}

TEST_CASE("summary CSV round trips and aggregates identically") {
  RunMatrix matrix = tiny_matrix();
  std::string dir = temp_dir("xstab_exp_roundtrip");
  auto records = run_experiment(matrix, dir);
  REQUIRE(!records.empty());

  auto rows = read_summary_csv(dir + "/summary.csv");
  REQUIRE(rows.size() == records.size());

  ReportStats from_records = build_report_stats(records);
  ReportStats from_csv = build_report_stats(rows);
  REQUIRE(from_records.size() == from_csv.size());
  for (const auto& [key, mem] : from_records) {
    const CellStats& disk = from_csv.at(key);
    CHECK(mem.total == disk.total);
    CHECK(mem.successes == disk.successes);
    CHECK(mem.success_rate == disk.success_rate);  // exact, via %.17g round trip
    CHECK(mem.mean_similarity == disk.mean_similarity);
    CHECK(mem.avg_perturbation_rate == disk.avg_perturbation_rate);
    CHECK(mem.min_perturbations == disk.min_perturbations);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment summaries are byte-identical across reruns") {
  RunMatrix matrix = tiny_matrix();
  std::string dir1 = temp_dir("xstab_exp_bytes1");
  std::string dir2 = temp_dir("xstab_exp_bytes2");
  run_experiment(matrix, dir1);
  run_experiment(matrix, dir2);
  CHECK(slurp(dir1 + "/summary.csv") == slurp(dir2 + "/summary.csv"));
  CHECK(slurp(dir1 + "/steps.csv") == slurp(dir2 + "/steps.csv"));
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("every reported min_perturbations is witnessed in the steps file") {
  RunMatrix matrix = tiny_matrix();
  matrix.thresholds = {0.6};
  std::string dir = temp_dir("xstab_exp_witness");
  auto records = run_experiment(matrix, dir);

  // count accept/replacement events per run in steps.csv
  auto steps = csv::read_file(dir + "/steps.csv");
  ReportStats stats = build_report_stats(records);
  for (const auto& [key, cell] : stats) {
    if (!cell.min_perturbations) continue;
    bool witnessed = false;
    for (const auto& rec : records) {
      if (rec.dataset != key.dataset || rec.tau != key.tau ||
          rec.measure != key.measure || rec.search != key.search) {
        continue;
      }
      if (rec.outcome.success &&
          static_cast<long>(rec.outcome.perturbations.size()) ==
              *cell.min_perturbations) {
        witnessed = true;
      }
    }
    CHECK(witnessed);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("report rendering: structure, dashes, two decimals") {
  ReportStats stats;
  CellStats full;
  full.total = 20;
  full.successes = 9;
  full.success_rate = 0.45;
  full.mean_similarity = 0.3333;
  full.avg_perturbation_rate = 0.134;
  full.min_perturbations = 2;
  CellStats empty;
  empty.total = 20;
  empty.successes = 0;
  empty.success_rate = 0.0;
  stats[{"short", 0.5, Measure::kJaccard, SearchKind::kGenetic}] = full;
  stats[{"short", 0.5, Measure::kJaccard, SearchKind::kGreedy}] = empty;

  std::string markdown = render_report(stats, ReportFormat::kMarkdown);
  CHECK(markdown.find("## Attack success rate") != std::string::npos);
  CHECK(markdown.find("## Mean similarity (successful attacks)") != std::string::npos);
  CHECK(markdown.find("## Average perturbation rate (successful attacks)") !=
        std::string::npos);
  CHECK(markdown.find("## Minimum perturbations (successful attacks)") !=
        std::string::npos);
  CHECK(markdown.find("jaccard GA") != std::string::npos);
  CHECK(markdown.find("jaccard GS") != std::string::npos);
  CHECK(markdown.find("0.45") != std::string::npos);  // two decimals
  CHECK(markdown.find("0.33") != std::string::npos);
  CHECK(markdown.find(" - |") != std::string::npos);  // dash for the empty cell

  std::string csv_text = render_report(stats, ReportFormat::kCsv);
  CHECK(csv_text.find("short,0.50,jaccard,GA,0.45,0.33,0.13,2") != std::string::npos);
  CHECK(csv_text.find("short,0.50,jaccard,GS,0.00,,,") != std::string::npos);
}

TEST_CASE("config parsing applies keys and rejects unknown ones") {
  std::string text =
      "# comment line\n"
      "datasets = short\n"
      "measures = jaccard, kendall_w\n"
      "thresholds = 0.3, 0.5\n"
      "searches = gs\n"
      "examples_per_cell = 3\n"
      "seed = 99\n"
      "epsilon = 0.2\n"
      "population = 8\n"
      "samples = 123\n";
  RunMatrix matrix = parse_experiment_config(text, "mem");
  CHECK(matrix.datasets.size() == 1);
  CHECK(matrix.datasets[0].name == "short");
  CHECK(matrix.measures == std::vector<Measure>{Measure::kJaccard, Measure::kKendallWeighted});
  CHECK(matrix.thresholds == std::vector<double>{0.3, 0.5});
  CHECK(matrix.searches == std::vector<SearchKind>{SearchKind::kGreedy});
  CHECK(matrix.examples_per_cell == 3);
  CHECK(matrix.master_seed == 99);
  CHECK(matrix.defaults.epsilon == 0.2);
  CHECK(matrix.defaults.ga_population == 8);
  CHECK(matrix.defaults.explainer.samples == 123);

  try {
    parse_experiment_config("no_such_key = 1\n", "mem");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("no_such_key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_experiment_config("thresholds = 1.5\n", "mem"), ParameterError);
  CHECK_THROWS_AS(parse_experiment_config("examples_per_cell = x\n", "mem"), FormatError);
  CHECK_THROWS_AS(parse_experiment_config("measures = bogus\n", "mem"), FormatError);
}

TEST_CASE("select_examples skips degenerate documents") {
  std::vector<LabeledText> corpus = {
      {"word word word", "a"},   // one distinct word: skipped
      {"two words here", "b"},
      {"!!!", "a"},              // punctuation only: skipped
      {"another usable text", "b"},
  };
  auto picked = select_examples(corpus, 10);
  CHECK(picked == std::vector<int>{1, 3});
}

TEST_CASE("search labels round trip") {
  CHECK(search_label(SearchKind::kGreedy) == "GS");
  CHECK(search_label(SearchKind::kGenetic) == "GA");
  CHECK(*parse_search("greedy") == SearchKind::kGreedy);
  CHECK(*parse_search("GA") == SearchKind::kGenetic);
  CHECK_FALSE(parse_search("simulated_annealing").has_value());
}
