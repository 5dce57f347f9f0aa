#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "xstab/errors.hpp"
#include "xstab/lime.hpp"
#include "xstab/model.hpp"

using namespace xstab;

namespace {

BowClassifier sentiment_model() {
  return train_bow({{"good fun great day", "pos"},
                    {"bad sad awful day", "neg"},
                    {"good great", "pos"},
                    {"bad awful", "neg"}});
}

// Brute-force weighted ridge via dense Gaussian elimination, written
// independently of the library's solver.
std::vector<double> oracle_ridge(const std::vector<std::vector<double>>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& w, double penalty) {
  const std::size_t n = x.size();
  const std::size_t d = x[0].size() + 1;  // intercept first
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> z(d, 1.0);
    for (std::size_t j = 1; j < d; ++j) z[j] = x[s][j - 1];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) a[i][j] += w[s] * z[i] * z[j];
      a[i][d] += w[s] * z[i] * y[s];
    }
  }
  for (std::size_t i = 1; i < d; ++i) a[i][i] += penalty;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= d; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> theta(d);
  for (std::size_t i = 0; i < d; ++i) theta[i] = a[i][d] / a[i][i];
  return theta;
}

}  // namespace

TEST_CASE("sample_masked contracts") {
  Document doc = tokenize("i love dogs ! dogs love balls .");
  ExplainerParams params;
  params.samples = 25;
  Rng rng(11);
  auto samples = sample_masked(doc, params, rng);

  REQUIRE(samples.size() == 25);

  SUBCASE("sample zero keeps everything") {
    CHECK(samples[0].tokens == doc.tokens);
    for (auto flag : samples[0].present) CHECK(flag == 1);
  }

  SUBCASE("removing a word removes all of its occurrences") {
    auto words = distinct_feature_words(doc);
    for (const auto& sample : samples) {
      for (std::size_t w = 0; w < words.size(); ++w) {
        bool present_anywhere =
            std::find(sample.tokens.begin(), sample.tokens.end(), words[w]) !=
            sample.tokens.end();
        CHECK(present_anywhere == static_cast<bool>(sample.present[w]));
      }
    }
  }

  SUBCASE("punctuation is not a feature and never vanishes") {
    CHECK(distinct_feature_words(doc) ==
          std::vector<std::string>{"i", "love", "dogs", "balls"});
    for (const auto& sample : samples) {
      CHECK(std::count(sample.tokens.begin(), sample.tokens.end(), "!") == 1);
      CHECK(std::count(sample.tokens.begin(), sample.tokens.end(), ".") == 1);
    }
  }

  SUBCASE("masks actually vary") {
    std::set<std::vector<std::uint8_t>> distinct;
    for (const auto& sample : samples) distinct.insert(sample.present);
    CHECK(distinct.size() > 1);
  }
}

TEST_CASE("sample_masked rejects degenerate documents") {
  ExplainerParams params;
  Rng rng(1);
  Document one_word = tokenize("hello hello hello !");
  CHECK_THROWS_AS(sample_masked(one_word, params, rng), DegenerateDocumentError);
}

TEST_CASE("explainer params are validated") {
  Document doc = tokenize("good bad day");
  BowClassifier model = sentiment_model();
  ExplainerParams params;
  params.samples = 5;
  CHECK_THROWS_AS(explain(model, doc, params, 1), ParameterError);
  params.samples = 100;
  params.mask_rate = 1.0;
  CHECK_THROWS_AS(explain(model, doc, params, 1), ParameterError);
  params.mask_rate = 0.3;
  params.max_features = 0;
  CHECK_THROWS_AS(explain(model, doc, params, 1), ParameterError);
  params.max_features = 10;
  params.kernel_width = 0.0;
  CHECK_THROWS_AS(explain(model, doc, params, 1), ParameterError);
}

TEST_CASE("explain is deterministic for a fixed seed") {
  BowClassifier model = sentiment_model();
  Document doc = tokenize("good fun day with a bad end");
  ExplainerParams params;
  params.samples = 200;
  Explanation a = explain(model, doc, params, 77);
  Explanation b = explain(model, doc, params, 77);
  REQUIRE(a.features.size() == b.features.size());
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    CHECK(a.features[i].word == b.features[i].word);
    CHECK(a.features[i].weight == b.features[i].weight);
  }
  Explanation c = explain(model, doc, params, 78);
  bool any_difference = false;
  for (std::size_t i = 0; i < std::min(a.features.size(), c.features.size()); ++i) {
    if (a.features[i].word != c.features[i].word ||
        a.features[i].weight != c.features[i].weight) {
      any_difference = true;
    }
  }
  CHECK(any_difference);  // different seed, different sampling noise
}

TEST_CASE("explanation ordering and membership invariants") {
  BowClassifier model = sentiment_model();
  Document doc = tokenize("good fun great day but a bad sad awful end !");
  ExplainerParams params;
  params.samples = 300;
  params.max_features = 5;
  Explanation e = explain(model, doc, params, 5);

  CHECK(e.features.size() == 5);  // capped at max_features
  std::set<std::string> seen;
  auto words = distinct_feature_words(doc);
  for (std::size_t i = 0; i < e.features.size(); ++i) {
    CHECK(seen.insert(e.features[i].word).second);  // distinct
    CHECK(std::find(words.begin(), words.end(), e.features[i].word) != words.end());
    if (i > 0) {
      double prev = std::fabs(e.features[i - 1].weight);
      double cur = std::fabs(e.features[i].weight);
      CHECK(prev >= cur);
      if (prev == cur) CHECK(e.features[i - 1].word < e.features[i].word);
    }
  }
}

TEST_CASE("two-feature surrogate matches brute-force weighted ridge") {
  BowClassifier model = sentiment_model();
  Document doc = tokenize("good day");  // distinct words: good, day
  ExplainerParams params;
  params.samples = 50;
  const std::uint64_t seed = 99;

  // replicate the sampling stream, then fit independently
  Rng rng(seed);
  auto samples = sample_masked(doc, params, rng);
  int target = model.predict(doc.tokens).argmax();

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<double> w;
  for (const auto& sample : samples) {
    double kept = 0.0;
    std::vector<double> row;
    for (auto flag : sample.present) {
      row.push_back(flag ? 1.0 : 0.0);
      kept += flag ? 1.0 : 0.0;
    }
    x.push_back(row);
    y.push_back(model.predict(sample.tokens).probabilities[target]);
    double cos = kept > 0 ? std::sqrt(kept / 2.0) : 0.0;
    w.push_back(std::exp(-(1.0 - cos) * (1.0 - cos) /
                         (params.kernel_width * params.kernel_width)));
  }
  auto theta = oracle_ridge(x, y, w, 1.0);

  Explanation e = explain(model, doc, params, seed);
  REQUIRE(e.features.size() == 2);
  double expected_good = theta[1];  // "good" is the first distinct word
  double expected_day = theta[2];
  for (const auto& feature : e.features) {
    double expected = feature.word == "good" ? expected_good : expected_day;
    CHECK(feature.weight == doctest::Approx(expected).epsilon(1e-9));
  }
  // the sentiment-bearing word dominates the neutral one
  CHECK(e.features[0].word == "good");
  CHECK(std::fabs(expected_good) > std::fabs(expected_day));
}

TEST_CASE("degenerate documents propagate through explain") {
  BowClassifier model = sentiment_model();
  Document doc = tokenize("good ! ! !");
  CHECK_THROWS_AS(explain(model, doc, {}, 3), DegenerateDocumentError);
}
