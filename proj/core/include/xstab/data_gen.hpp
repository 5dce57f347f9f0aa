#pragma once

#include <string>
#include <vector>

#include "xstab/embedding.hpp"
#include "xstab/model.hpp"

namespace xstab {

/// Built-in labeled corpora, generated deterministically from templates.
/// "short" averages about 11 tokens per document (2 classes), "medium" about
/// 29 (3 classes). The companion embedding table covers every word of both
/// corpora and clusters synonyms so replacement candidates exist.
std::vector<LabeledText> builtin_short_corpus();
std::vector<LabeledText> builtin_medium_corpus();

EmbeddingStore builtin_embeddings();

/// Embedding table serialized in the `word v1 ... vD` file format.
std::string builtin_embeddings_text();

/// Writes short.csv, medium.csv, and embeddings.txt into `directory`.
void write_builtin_data(const std::string& directory);

}  // namespace xstab
