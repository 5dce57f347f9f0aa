#pragma once

#include <stdexcept>
#include <string>

namespace xstab {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An index is outside the addressable range of its container.
struct RangeError : Error {
  using Error::Error;
};

/// A token index was perturbed twice within one attack.
struct DoublePerturbationError : Error {
  using Error::Error;
};

/// A replacement word equals the word it would replace.
struct NoOpReplacementError : Error {
  using Error::Error;
};

/// Two documents do not share a common ancestor (token counts differ).
struct LineageError : Error {
  using Error::Error;
};

/// A hyper-parameter is outside its legal range.
struct ParameterError : Error {
  using Error::Error;
};

/// A training corpus cannot support classification (single label).
struct DegenerateCorpusError : Error {
  using Error::Error;
};

/// A required collection was empty.
struct EmptyInputError : Error {
  using Error::Error;
};

/// A document has too few distinct words to explain.
struct DegenerateDocumentError : Error {
  using Error::Error;
};

/// A similarity measure received an empty ranked list.
struct EmptyExplanationError : Error {
  using Error::Error;
};

/// A file's contents violate its declared format.
struct FormatError : Error {
  using Error::Error;
};

/// A data file could not be ingested; message names file and line.
struct IngestionError : Error {
  using Error::Error;
};

/// No document word is covered by the embedding vocabulary.
struct CoverageError : Error {
  using Error::Error;
};

/// Filesystem failure (unreadable/unwritable path).
struct IoError : Error {
  using Error::Error;
};

}  // namespace xstab
