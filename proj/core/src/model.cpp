#include "xstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xstab/csv.hpp"
#include "xstab/errors.hpp"

namespace xstab {

namespace {

std::vector<std::pair<int, double>> count_features(
    const std::vector<std::string>& tokens,
    const std::unordered_map<std::string, int>& vocab) {
  std::unordered_map<int, double> counts;
  for (const auto& token : tokens) {
    auto it = vocab.find(token);
    if (it != vocab.end()) counts[it->second] += 1.0;
  }
  std::vector<std::pair<int, double>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> softmax(std::vector<double> logits) {
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - max_logit);
    sum += z;
  }
  for (double& z : logits) z /= sum;
  return logits;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& field, const std::string& origin, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw FormatError(origin + ":" + std::to_string(line) +
                      ": expected a number, got '" + field + "'");
  }
}

}  // namespace

int LabelDistribution::argmax() const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(probabilities.size()); ++i) {
    if (probabilities[i] > probabilities[best]) best = i;
  }
  return best;
}

LabelDistribution BowClassifier::predict(const std::vector<std::string>& tokens) const {
  auto features = count_features(tokens, vocab_);
  std::vector<double> logits = biases_;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const auto& w = weights_[c];
    for (const auto& [f, count] : features) logits[c] += w[f] * count;
  }
  return LabelDistribution{softmax(std::move(logits))};
}

BowClassifier train_bow(const std::vector<LabeledText>& corpus,
                        const TrainParams& params, std::vector<double>* losses) {
  if (corpus.empty()) throw EmptyInputError("training corpus is empty");

  BowClassifier model;
  std::unordered_map<std::string, int> label_index;
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<int> row_labels;
  rows.reserve(corpus.size());

  for (const auto& example : corpus) {
    auto it = label_index.find(example.label);
    if (it == label_index.end()) {
      it = label_index.emplace(example.label, static_cast<int>(model.classes_.size())).first;
      model.classes_.push_back(example.label);
    }
    row_labels.push_back(it->second);
    Document doc = tokenize(example.text);
    for (const auto& token : doc.tokens) {
      if (!model.vocab_.contains(token)) {
        model.vocab_.emplace(token, static_cast<int>(model.vocab_words_.size()));
        model.vocab_words_.push_back(token);
      }
    }
    rows.push_back({});  // filled below once the vocabulary is complete
  }
  if (model.classes_.size() < 2) {
    throw DegenerateCorpusError("corpus has a single label: '" +
                                model.classes_.front() + "'");
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    rows[i] = count_features(tokenize(corpus[i].text).tokens, model.vocab_);
  }

  const std::size_t num_classes = model.classes_.size();
  const std::size_t num_features = model.vocab_words_.size();
  const double n = static_cast<double>(rows.size());
  model.weights_.assign(num_classes, std::vector<double>(num_features, 0.0));
  model.biases_.assign(num_classes, 0.0);

  std::vector<std::vector<double>> grad_w(num_classes,
                                          std::vector<double>(num_features, 0.0));
  std::vector<double> grad_b(num_classes, 0.0);

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    double loss = 0.0;

    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<double> logits = model.biases_;
      for (std::size_t c = 0; c < num_classes; ++c) {
        for (const auto& [f, count] : rows[i]) logits[c] += model.weights_[c][f] * count;
      }
      std::vector<double> probs = softmax(std::move(logits));
      loss -= std::log(std::max(probs[row_labels[i]], 1e-300));
      for (std::size_t c = 0; c < num_classes; ++c) {
        double err = probs[c] - (static_cast<int>(c) == row_labels[i] ? 1.0 : 0.0);
        grad_b[c] += err;
        for (const auto& [f, count] : rows[i]) grad_w[c][f] += err * count;
      }
    }

    loss /= n;
    for (std::size_t c = 0; c < num_classes; ++c) {
      for (std::size_t f = 0; f < num_features; ++f) {
        loss += 0.5 * params.l2 * model.weights_[c][f] * model.weights_[c][f] / n;
        model.weights_[c][f] -=
            params.learning_rate *
            (grad_w[c][f] / n + params.l2 * model.weights_[c][f] / n);
      }
      model.biases_[c] -= params.learning_rate * grad_b[c] / n;
    }
    if (losses) losses->push_back(loss);
  }
  return model;
}

double word_importance(const TextClassifier& model, const Document& doc,
                       std::size_t index) {
  if (index >= doc.tokens.size()) {
    throw RangeError("importance index " + std::to_string(index) +
                     " out of range for " + std::to_string(doc.tokens.size()) +
                     " tokens");
  }
  LabelDistribution base = model.predict(doc.tokens);
  int predicted = base.argmax();
  std::vector<std::string> without;
  without.reserve(doc.tokens.size() - 1);
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (i != index) without.push_back(doc.tokens[i]);
  }
  LabelDistribution ablated = model.predict(without);
  return base.probabilities[predicted] - ablated.probabilities[predicted];
}

std::string BowClassifier::to_text() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (i) out << '\t';
    out << classes_[i];
  }
  out << '\n';
  for (std::size_t i = 0; i < vocab_words_.size(); ++i) {
    if (i) out << '\t';
    out << vocab_words_[i];
  }
  out << '\n';
  for (const auto& row : weights_) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (f) out << ' ';
      out << format_double(row[f]);
    }
    out << '\n';
  }
  for (std::size_t c = 0; c < biases_.size(); ++c) {
    if (c) out << ' ';
    out << format_double(biases_[c]);
  }
  out << '\n';
  return out.str();
}

BowClassifier BowClassifier::from_text(const std::string& text,
                                       const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.size() < 4) {
    throw FormatError(origin + ": model file needs at least 4 lines, got " +
                      std::to_string(lines.size()));
  }

  BowClassifier model;
  model.classes_ = split_on(lines[0], '\t');
  if (model.classes_.size() < 2) {
    throw FormatError(origin + ":1: fewer than two classes");
  }
  model.vocab_words_ = split_on(lines[1], '\t');
  if (model.vocab_words_.size() == 1 && model.vocab_words_[0].empty()) {
    model.vocab_words_.clear();
  }
  for (std::size_t i = 0; i < model.vocab_words_.size(); ++i) {
    model.vocab_.emplace(model.vocab_words_[i], static_cast<int>(i));
  }

  std::size_t expected_lines = 2 + model.classes_.size() + 1;
  if (lines.size() != expected_lines) {
    throw FormatError(origin + ": expected " + std::to_string(expected_lines) +
                      " lines, got " + std::to_string(lines.size()));
  }
  for (std::size_t c = 0; c < model.classes_.size(); ++c) {
    int line_no = static_cast<int>(3 + c);
    auto fields = split_on(lines[2 + c], ' ');
    if (model.vocab_words_.empty() && fields.size() == 1 && fields[0].empty()) {
      fields.clear();
    }
    if (fields.size() != model.vocab_words_.size()) {
      throw FormatError(origin + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(model.vocab_words_.size()) +
                        " coefficients, got " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, origin, line_no));
    model.weights_.push_back(std::move(row));
  }
  int bias_line = static_cast<int>(lines.size());
  auto fields = split_on(lines.back(), ' ');
  if (fields.size() != model.classes_.size()) {
    throw FormatError(origin + ":" + std::to_string(bias_line) + ": expected " +
                      std::to_string(model.classes_.size()) + " biases, got " +
                      std::to_string(fields.size()));
  }
  for (const auto& f : fields) {
    model.biases_.push_back(parse_double(f, origin, bias_line));
  }
  return model;
}

void BowClassifier::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  out << to_text();
  if (!out) throw IoError("failed writing model file: " + path);
}

BowClassifier BowClassifier::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

std::vector<LabeledText> load_corpus_csv(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) {
    throw IngestionError(path + ":1: empty corpus file");
  }
  if (rows[0].size() != 2 || rows[0][0] != "text" || rows[0][1] != "label") {
    throw IngestionError(path + ":1: expected header 'text,label'");
  }
  std::vector<LabeledText> corpus;
  corpus.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      throw IngestionError(path + ":" + std::to_string(i + 1) +
                           ": expected 2 fields, got " +
                           std::to_string(rows[i].size()));
    }
    corpus.push_back({rows[i][0], rows[i][1]});
  }
  return corpus;
}

void save_corpus_csv(const std::vector<LabeledText>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file: " + path);
  out << "text,label\n";
  for (const auto& example : corpus) {
    out << csv::join_row({example.text, example.label}) << '\n';
  }
  if (!out) throw IoError("failed writing corpus file: " + path);
}

}  // namespace xstab
