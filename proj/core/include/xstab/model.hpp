#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "xstab/text.hpp"

namespace xstab {

/// Class probabilities for one prediction. Sums to 1; argmax ties resolve to
/// the lowest class index.
struct LabelDistribution {
  std::vector<double> probabilities;

  int argmax() const;
};

/// The black-box target being explained. Anything that maps a token list to
/// class probabilities can be attacked; the built-in BowClassifier is just
/// the self-contained default.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual LabelDistribution predict(const std::vector<std::string>& tokens) const = 0;
  virtual const std::vector<std::string>& classes() const = 0;
};

struct LabeledText {
  std::string text;
  std::string label;
};

struct TrainParams {
  int epochs = 500;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::uint64_t seed = 0;  // initialization is zero, kept for interface stability
};

/// Bag-of-words multinomial logistic regression on raw token counts.
class BowClassifier final : public TextClassifier {
 public:
  LabelDistribution predict(const std::vector<std::string>& tokens) const override;
  const std::vector<std::string>& classes() const override { return classes_; }

  const std::unordered_map<std::string, int>& vocabulary() const { return vocab_; }
  std::size_t vocabulary_size() const { return vocab_words_.size(); }

  /// Flat text persistence: class names, vocabulary, one coefficient row per
  /// class, then biases. Round-trips exactly.
  void save(const std::string& path) const;
  static BowClassifier load(const std::string& path);

  std::string to_text() const;
  static BowClassifier from_text(const std::string& text, const std::string& origin);

 private:
  friend BowClassifier train_bow(const std::vector<LabeledText>&, const TrainParams&,
                                 std::vector<double>*);
  std::vector<std::string> classes_;
  std::vector<std::string> vocab_words_;            // dense index -> word
  std::unordered_map<std::string, int> vocab_;      // word -> dense index
  std::vector<std::vector<double>> weights_;        // [class][feature]
  std::vector<double> biases_;                      // [class]
};

/// Full-batch gradient descent fit. Deterministic given (corpus, params).
/// Throws EmptyInputError on an empty corpus and DegenerateCorpusError when
/// fewer than two labels are present. Per-epoch training losses are appended
/// to `losses` when given.
BowClassifier train_bow(const std::vector<LabeledText>& corpus,
                        const TrainParams& params = {},
                        std::vector<double>* losses = nullptr);

/// Drop in output probability of the predicted class when the token at
/// `index` is deleted: P(c|doc) - P(c|doc minus token), c = argmax on the
/// unmodified doc. Throws RangeError on a bad index.
double word_importance(const TextClassifier& model, const Document& doc,
                       std::size_t index);

/// Loads a `text,label` CSV corpus (UTF-8, RFC 4180). Throws IngestionError
/// naming file and line on malformed rows or a bad header.
std::vector<LabeledText> load_corpus_csv(const std::string& path);

/// Writes a corpus in the same CSV format.
void save_corpus_csv(const std::vector<LabeledText>& corpus, const std::string& path);

}  // namespace xstab
