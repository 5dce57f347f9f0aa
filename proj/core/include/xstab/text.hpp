#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace xstab {

/// One applied word replacement, keyed by token index in Document::replaced.
struct Replacement {
  std::string original;
  std::string replacement;

  bool operator==(const Replacement&) const = default;
};

/// A tokenized document. `tokens` carries replacements already applied;
/// `replaced` remembers where and what, so the pristine token list can be
/// reconstructed. Joining `tokens` with single spaces is the perturbed
/// surface form.
struct Document {
  std::string raw;                              // original input text
  std::vector<std::string> tokens;              // lowercased, with replacements
  std::map<std::size_t, Replacement> replaced;  // index -> (original, new)

  std::string surface() const;

  bool operator==(const Document& other) const = default;
};

/// True when every byte of the token is ASCII punctuation.
bool is_punctuation_token(std::string_view token);

/// Lowercases, splits on whitespace, and detaches leading/trailing ASCII
/// punctuation into standalone tokens. Interior punctuation (don't, e-mail)
/// stays attached. Empty input yields an empty token list.
Document tokenize(std::string_view text);

/// Returns a copy of `doc` with tokens[index] = word and the replacement
/// recorded. The input document is not modified.
///
/// Throws RangeError, DoublePerturbationError, or NoOpReplacementError per
/// the respective precondition; ParameterError if `word` is empty or
/// contains whitespace.
Document apply_replacement(const Document& doc, std::size_t index,
                           const std::string& word);

/// Number of replacements separating `perturbed` from its base document.
/// Throws LineageError when the token counts differ.
std::size_t perturbation_count(const Document& base, const Document& perturbed);

/// The token list with every recorded replacement undone.
std::vector<std::string> original_tokens(const Document& doc);

std::size_t non_punct_token_count(const Document& doc);

}  // namespace xstab
