#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynanom {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed textual input (CSV rows, IP strings, JSON configs).
struct ParseError : Error {
  using Error::Error;
};

// Packet or flow timestamps decrease where a sorted stream is required.
struct UnsortedInputError : Error {
  using Error::Error;
};

// Fewer distinct points than requested clusters.
struct TooFewPointsError : Error {
  using Error::Error;
};

// An operation that needs observed data received none.
struct EmptyReferenceError : Error {
  using Error::Error;
};

// A symbol index fell outside the declared alphabet.
struct SymbolOutOfAlphabetError : Error {
  using Error::Error;
};

// Two measures (or a measure and a family) disagree on alphabet size.
struct AlphabetMismatchError : Error {
  using Error::Error;
};

// No period estimate and no prior: candidate generation cannot run.
struct NoPeriodAvailableError : Error {
  using Error::Error;
};

// A divergence query against a family with no laws in it.
struct EmptyFamilyError : Error {
  using Error::Error;
};

// Set cover has rows no column can cover; carries those row indices.
struct InfeasibleCoverError : Error {
  std::vector<std::size_t> uncoverable_rows;

  InfeasibleCoverError(std::string msg, std::vector<std::size_t> rows)
      : Error(std::move(msg)), uncoverable_rows(std::move(rows)) {}
};

// Exact set cover refused to enumerate: too many columns.
struct TooLargeError : Error {
  using Error::Error;
};

}  // namespace dynanom
