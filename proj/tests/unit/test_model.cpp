#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "xstab/errors.hpp"
#include "xstab/model.hpp"

using namespace xstab;

namespace {

std::vector<LabeledText> toy_corpus() {
  return {{"good", "pos"}, {"bad", "neg"}};
}

// Independent oracle: plain binary logistic regression on the two count
// features, fitted with its own loop. Only the decision sign is compared.
double oracle_p_pos_given_good() {
  // features per example: (good_count, bad_count); labels pos=1, neg=0
  double w0 = 0.0, w1 = 0.0, b = 0.0;
  const double x[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  const double y[2] = {1.0, 0.0};
  for (int it = 0; it < 2000; ++it) {
    double g0 = 0.0, g1 = 0.0, gb = 0.0;
    for (int i = 0; i < 2; ++i) {
      double z = w0 * x[i][0] + w1 * x[i][1] + b;
      double p = 1.0 / (1.0 + std::exp(-z));
      double err = p - y[i];
      g0 += err * x[i][0];
      g1 += err * x[i][1];
      gb += err;
    }
    w0 -= 0.1 * g0 / 2;
    w1 -= 0.1 * g1 / 2;
    b -= 0.1 * gb / 2;
  }
  double z = w0 * 1.0 + w1 * 0.0 + b;
  return 1.0 / (1.0 + std::exp(-z));
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("toy fit separates two disjoint one-word classes") {
  BowClassifier model = train_bow(toy_corpus());
  REQUIRE(model.classes() == std::vector<std::string>{"pos", "neg"});

  CHECK(oracle_p_pos_given_good() > 0.5);
  LabelDistribution dist = model.predict({"good"});
  CHECK(dist.argmax() == 0);
  CHECK(dist.probabilities[0] > 0.5);
  CHECK(model.predict({"bad"}).argmax() == 1);
}

TEST_CASE("degenerate corpora are rejected") {
  CHECK_THROWS_AS(train_bow({}), EmptyInputError);
  CHECK_THROWS_AS(train_bow({{"good", "pos"}, {"fine", "pos"}}), DegenerateCorpusError);
}

TEST_CASE("training loss decreases monotonically") {
  std::vector<double> losses;
  train_bow({{"good great fun", "pos"},
             {"bad awful sad", "neg"},
             {"great good", "pos"},
             {"awful bad bad", "neg"}},
            {}, &losses);
  REQUIRE(losses.size() == 500);
  for (std::size_t i = 1; i < losses.size(); ++i) {
    CHECK(losses[i] <= losses[i - 1] + 1e-12);
  }
}

TEST_CASE("prediction is a pure function of the token multiset") {
  BowClassifier model = train_bow({{"good fun day", "pos"}, {"bad sad day", "neg"}});
  auto a = model.predict({"good", "day", "fun"});
  auto b = model.predict({"fun", "good", "day"});
  CHECK(a.probabilities == b.probabilities);

  // duplicated text keeps the argmax of the single word
  CHECK(model.predict({"good", "good"}).argmax() == model.predict({"good"}).argmax());
}

TEST_CASE("unseen words contribute nothing") {
  BowClassifier model = train_bow(toy_corpus());
  auto oov = model.predict({"zebra", "quark"});
  auto empty = model.predict({});
  CHECK(oov.probabilities == empty.probabilities);

  double sum = 0.0;
  for (double p : oov.probabilities) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("label distribution always normalizes") {
  BowClassifier model = train_bow({{"alpha beta", "a"},
                                   {"gamma delta", "b"},
                                   {"epsilon zeta", "c"}});
  for (auto tokens : {std::vector<std::string>{"alpha"},
                      std::vector<std::string>{"gamma", "epsilon"},
                      std::vector<std::string>{}}) {
    auto dist = model.predict(tokens);
    double sum = 0.0;
    for (double p : dist.probabilities) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("word_importance matches direct ablation") {
  BowClassifier model = train_bow({{"good fun day", "pos"}, {"bad sad day", "neg"}});
  Document doc = tokenize("good fun zebra good");

  SUBCASE("out-of-vocabulary token has zero importance") {
    CHECK(std::fabs(word_importance(model, doc, 2)) < 1e-12);
  }

  SUBCASE("importance equals the predict delta recomputed directly") {
    auto base = model.predict(doc.tokens);
    int predicted = base.argmax();
    // delete one of the two "good" occurrences: effect of count 2 -> 1
    auto without = model.predict({"fun", "zebra", "good"});
    double expected = base.probabilities[predicted] - without.probabilities[predicted];
    CHECK(word_importance(model, doc, 0) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("deleting the strongest positive word drops the probability") {
    Document single = tokenize("good day");
    CHECK(word_importance(model, single, 0) > 0.0);
  }

  SUBCASE("out of range index") {
    CHECK_THROWS_AS(word_importance(model, doc, doc.tokens.size()), RangeError);
  }
}

TEST_CASE("model text round trip is exact") {
  BowClassifier model = train_bow({{"good fun , day !", "pos"}, {"bad sad day", "neg"}});
  std::string text = model.to_text();
  BowClassifier reloaded = BowClassifier::from_text(text, "mem");
  CHECK(reloaded.to_text() == text);
  auto a = model.predict({"good", "sad", "day"});
  auto b = reloaded.predict({"good", "sad", "day"});
  CHECK(a.probabilities == b.probabilities);

  std::string path = temp_path("xstab_model_roundtrip.txt");
  model.save(path);
  BowClassifier from_file = BowClassifier::load(path);
  CHECK(from_file.to_text() == text);
  std::filesystem::remove(path);
}

TEST_CASE("model parser rejects malformed input") {
  CHECK_THROWS_AS(BowClassifier::from_text("pos\tneg\n", "mem"), FormatError);
  CHECK_THROWS_AS(BowClassifier::from_text("pos\tneg\nw1\tw2\n1 2\n3 x\n0 0\n", "mem"),
                  FormatError);
  // coefficient row of the wrong arity
  CHECK_THROWS_AS(BowClassifier::from_text("pos\tneg\nw1\tw2\n1\n3 4\n0 0\n", "mem"),
                  FormatError);
}

TEST_CASE("corpus CSV loading") {
  std::string path = temp_path("xstab_corpus.csv");
  {
    std::ofstream out(path, std::ios::binary);
    out << "text,label\n\"hello, there\",pos\nplain text,neg\n";
  }
  auto corpus = load_corpus_csv(path);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].text == "hello, there");
  CHECK(corpus[0].label == "pos");
  CHECK(corpus[1].text == "plain text");
  std::filesystem::remove(path);
}

TEST_CASE("corpus CSV errors name file and line") {
  std::string path = temp_path("xstab_corpus_bad.csv");
  {
    std::ofstream out(path, std::ios::binary);
    out << "text,label\nonly_one_field\n";
  }
  try {
    load_corpus_csv(path);
    FAIL("expected IngestionError");
  } catch (const IngestionError& e) {
    std::string message = e.what();
    CHECK(message.find(path) != std::string::npos);
    CHECK(message.find(":2") != std::string::npos);
  }
  std::filesystem::remove(path);

  std::string bad_header = temp_path("xstab_corpus_hdr.csv");
  {
    std::ofstream out(bad_header, std::ios::binary);
    out << "body,tag\nx,y\n";
  }
  CHECK_THROWS_AS(load_corpus_csv(bad_header), IngestionError);
  std::filesystem::remove(bad_header);
}

TEST_CASE("corpus CSV write/read round trip") {
  std::string path = temp_path("xstab_corpus_rt.csv");
  std::vector<LabeledText> corpus = {{"with, comma", "a"}, {"with \"quote\"", "b"}};
  save_corpus_csv(corpus, path);
  auto reloaded = load_corpus_csv(path);
  REQUIRE(reloaded.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(reloaded[i].text == corpus[i].text);
    CHECK(reloaded[i].label == corpus[i].label);
  }
  std::filesystem::remove(path);
}
