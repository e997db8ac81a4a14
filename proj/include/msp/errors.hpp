#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

// Schur complement S_j failed its SPD check while building the chain.
struct SchurNotSpd : NotPositiveDefinite {
  std::size_t level;
  explicit SchurNotSpd(std::size_t j)
      : NotPositiveDefinite("Schur complement S_" + std::to_string(j) +
                            " is not positive definite"),
        level(j) {}
};

struct NoConvergence : Error {
  using Error::Error;
};

// Krylov basis collapsed while the residual was still nonzero.
struct Breakdown : Error {
  using Error::Error;
};

struct DegenerateTriangle : Error {
  using Error::Error;
};

struct UnsupportedElement : Error {
  using Error::Error;
};

struct EmptyInactiveSet : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace msp
