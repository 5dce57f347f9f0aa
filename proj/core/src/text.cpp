#include "xstab/text.hpp"

#include <cctype>

#include "xstab/errors.hpp"

namespace xstab {

namespace {

bool is_ascii_punct(unsigned char c) { return c < 128 && std::ispunct(c); }

bool is_ascii_space(unsigned char c) { return c < 128 && std::isspace(c); }

std::string to_lower(std::string_view chunk) {
  std::string out;
  out.reserve(chunk.size());
  for (unsigned char c : chunk) {
    out.push_back(c < 128 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  return out;
}

// Splits one whitespace-delimited chunk into leading punctuation tokens, the
// core word, and trailing punctuation tokens, in surface order.
void emit_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_ascii_punct(static_cast<unsigned char>(chunk[begin]))) ++begin;
  while (end > begin && is_ascii_punct(static_cast<unsigned char>(chunk[end - 1]))) --end;
  if (begin == end) {
    // all punctuation: one token per character
    for (char c : chunk) out.emplace_back(1, c);
    return;
  }
  for (std::size_t i = 0; i < begin; ++i) out.emplace_back(1, chunk[i]);
  out.push_back(to_lower(chunk.substr(begin, end - begin)));
  for (std::size_t i = end; i < chunk.size(); ++i) out.emplace_back(1, chunk[i]);
}

}  // namespace

std::string Document::surface() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool is_punctuation_token(std::string_view token) {
  if (token.empty()) return false;
  for (unsigned char c : token) {
    if (!is_ascii_punct(c)) return false;
  }
  return true;
}

Document tokenize(std::string_view text) {
  Document doc;
  doc.raw.assign(text);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) emit_chunk(text.substr(start, i - start), doc.tokens);
  }
  return doc;
}

Document apply_replacement(const Document& doc, std::size_t index,
                           const std::string& word) {
  if (index >= doc.tokens.size()) {
    throw RangeError("replacement index " + std::to_string(index) +
                     " out of range for " + std::to_string(doc.tokens.size()) +
                     " tokens");
  }
  if (doc.replaced.contains(index)) {
    throw DoublePerturbationError("token index " + std::to_string(index) +
                                  " already perturbed");
  }
  if (word == doc.tokens[index]) {
    throw NoOpReplacementError("replacement equals current token '" + word + "'");
  }
  if (word.empty()) throw ParameterError("replacement word is empty");
  for (unsigned char c : word) {
    if (is_ascii_space(c)) {
      throw ParameterError("replacement word contains whitespace: '" + word + "'");
    }
  }
  Document out = doc;
  out.replaced.emplace(index, Replacement{doc.tokens[index], word});
  out.tokens[index] = word;
  return out;
}

std::size_t perturbation_count(const Document& base, const Document& perturbed) {
  if (base.tokens.size() != perturbed.tokens.size()) {
    throw LineageError("documents have different token counts (" +
                       std::to_string(base.tokens.size()) + " vs " +
                       std::to_string(perturbed.tokens.size()) + ")");
  }
  return perturbed.replaced.size();
}

std::vector<std::string> original_tokens(const Document& doc) {
  std::vector<std::string> tokens = doc.tokens;
  for (const auto& [index, rec] : doc.replaced) tokens[index] = rec.original;
  return tokens;
}

std::size_t non_punct_token_count(const Document& doc) {
  std::size_t count = 0;
  for (const auto& token : doc.tokens) {
    if (!is_punctuation_token(token)) ++count;
  }
  return count;
}

}  // namespace xstab
