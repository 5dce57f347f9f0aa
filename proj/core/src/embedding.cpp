#include "xstab/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xstab/errors.hpp"

namespace xstab {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

}  // namespace

bool EmbeddingStore::insert(const std::string& word, std::vector<double> vector) {
  if (dimension_ == 0) {
    dimension_ = static_cast<int>(vector.size());
    if (dimension_ == 0) throw FormatError("embedding vector for '" + word + "' is empty");
  } else if (static_cast<int>(vector.size()) != dimension_) {
    throw FormatError("embedding dimension mismatch for '" + word + "': expected " +
                      std::to_string(dimension_) + ", got " +
                      std::to_string(vector.size()));
  }
  double length = norm(vector);
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw FormatError("embedding vector for '" + word + "' cannot be normalized");
  }
  for (double& x : vector) x /= length;

  auto it = index_.find(word);
  if (it != index_.end()) {
    vectors_[it->second] = std::move(vector);
    return false;
  }
  auto pos = std::lower_bound(words_.begin(), words_.end(), word) - words_.begin();
  words_.insert(words_.begin() + pos, word);
  vectors_.insert(vectors_.begin() + pos, std::move(vector));
  for (auto& [w, i] : index_) {
    if (i >= static_cast<std::size_t>(pos)) ++i;
  }
  index_.emplace(word, static_cast<std::size_t>(pos));
  return true;
}

const std::vector<double>* EmbeddingStore::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return nullptr;
  return &vectors_[it->second];
}

EmbeddingStore parse_embeddings(const std::string& text, const std::string& origin,
                                EmbeddingLoadStats* stats) {
  EmbeddingStore store;
  EmbeddingLoadStats local;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> values;
    std::string field;
    while (fields >> field) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw FormatError(origin + ":" + std::to_string(line_no) +
                          ": non-numeric field '" + field + "'");
      }
    }
    if (first_content_line) {
      first_content_line = false;
      // Optional `COUNT DIM` header: two integer fields, the first being the
      // "word". Recognize and skip it.
      if (values.size() == 1) {
        char* end = nullptr;
        std::strtol(word.c_str(), &end, 10);
        double intpart;
        if (end && *end == '\0' && std::modf(values[0], &intpart) == 0.0) continue;
      }
    }
    if (values.empty()) {
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": entry '" + word + "' has no vector components");
    }
    try {
      if (!store.insert(word, std::move(values))) ++local.duplicates_replaced;
    } catch (const FormatError& e) {
      throw FormatError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  local.entries = store.size();
  if (stats) *stats = local;
  return store;
}

EmbeddingStore load_embeddings(const std::string& path, EmbeddingLoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_embeddings(buf.str(), path, stats);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingStore& store,
                                        std::string_view word, int count,
                                        double min_cosine) {
  std::vector<Neighbor> result;
  if (count <= 0) return result;
  const std::vector<double>* query = store.find(word);
  if (!query) return result;

  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store.words()[i] == word) continue;
    double cos = dot(*query, store.vector_at(i));
    cos = std::clamp(cos, -1.0, 1.0);
    if (cos >= min_cosine) result.push_back({store.words()[i], cos});
  }
  std::sort(result.begin(), result.end(), [](const Neighbor& l, const Neighbor& r) {
    if (l.cosine != r.cosine) return l.cosine > r.cosine;
    return l.word < r.word;
  });
  if (result.size() > static_cast<std::size_t>(count)) {
    result.resize(static_cast<std::size_t>(count));
  }
  return result;
}

double doc_similarity(const EmbeddingStore& store, const Document& a,
                      const Document& b) {
  auto mean_vector = [&](const Document& doc, const char* side) {
    std::vector<double> mean(static_cast<std::size_t>(store.dimension()), 0.0);
    std::size_t covered = 0;
    for (const auto& token : doc.tokens) {
      if (is_punctuation_token(token)) continue;
      const std::vector<double>* v = store.find(token);
      if (!v) continue;
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (*v)[i];
      ++covered;
    }
    if (covered == 0) {
      throw CoverageError(std::string("document ") + side +
                          " has no in-vocabulary words");
    }
    for (double& x : mean) x /= static_cast<double>(covered);
    return mean;
  };
  std::vector<double> ma = mean_vector(a, "a");
  std::vector<double> mb = mean_vector(b, "b");
  double denom = norm(ma) * norm(mb);
  if (denom == 0.0) return 0.0;
  return std::clamp(dot(ma, mb) / denom, -1.0, 1.0);
}

}  // namespace xstab
