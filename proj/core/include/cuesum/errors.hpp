#pragma once

#include <stdexcept>
#include <string>

namespace cuesum {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidWeights : public Error {
 public:
  using Error::Error;
};

class TooFewWeights : public InvalidWeights {
 public:
  explicit TooFewWeights(std::size_t count);
};

class ZeroWeight : public InvalidWeights {
 public:
  explicit ZeroWeight(std::size_t index);
};

// Arguments outside an operation's mathematical domain (c = 0, |u| <= 1,
// partition longer than L, wrong arity, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// No sign vector of the eigenvalue master equation produced an admissible M.
class NoAdmissibleBranch : public Error {
 public:
  using Error::Error;
};

// The conjectured inner radius disagrees with the numerically located edge.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(double formula_radius, double numeric_radius);

  double formula_radius() const noexcept { return formula_; }
  double numeric_radius() const noexcept { return numeric_; }

 private:
  double formula_;
  double numeric_;
};

// Continuation of the singular-value Green function lost the root.
class BranchTrackingFailure : public Error {
 public:
  using Error::Error;
};

class InvalidEnsemble : public Error {
 public:
  using Error::Error;
};

class EigensolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace cuesum
