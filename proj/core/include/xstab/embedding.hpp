#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xstab/text.hpp"

namespace xstab {

/// Word-vector table with unit-normalized rows. Entries iterate in sorted
/// word order so every scan is deterministic.
class EmbeddingStore {
 public:
  int dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }

  /// Normalizes and inserts; replaces an existing entry and returns false in
  /// that case. Throws FormatError on a dimension mismatch or a zero vector.
  bool insert(const std::string& word, std::vector<double> vector);

  const std::vector<double>* find(std::string_view word) const;

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<double>& vector_at(std::size_t i) const { return vectors_[i]; }

 private:
  int dimension_ = 0;
  std::vector<std::string> words_;          // sorted
  std::vector<std::vector<double>> vectors_;  // parallel to words_
  std::unordered_map<std::string, std::size_t> index_;
};

struct EmbeddingLoadStats {
  std::size_t entries = 0;
  std::size_t duplicates_replaced = 0;
};

/// Loads `word v1 ... vD` lines (an optional leading `COUNT DIM` integer pair
/// is skipped). Vectors are unit-normalized; a repeated word keeps its last
/// occurrence and bumps duplicates_replaced. Throws FormatError on ragged
/// dimensions or non-numeric fields, IoError when unreadable.
EmbeddingStore load_embeddings(const std::string& path,
                               EmbeddingLoadStats* stats = nullptr);

EmbeddingStore parse_embeddings(const std::string& text, const std::string& origin,
                                EmbeddingLoadStats* stats = nullptr);

struct Neighbor {
  std::string word;
  double cosine;
};

/// Up to `count` nearest neighbors of `word` with cosine >= min_cosine,
/// sorted by cosine descending then word ascending. The query itself is
/// excluded; an unknown query yields an empty list.
std::vector<Neighbor> nearest_neighbors(const EmbeddingStore& store,
                                        std::string_view word, int count,
                                        double min_cosine);

/// Cosine of the mean word vectors of the two documents; punctuation and
/// out-of-vocabulary tokens are skipped. Throws CoverageError when a document
/// has no in-vocabulary word.
double doc_similarity(const EmbeddingStore& store, const Document& a,
                      const Document& b);

}  // namespace xstab
