#include "cuesum/errors.hpp"

#include <sstream>

namespace cuesum {

TooFewWeights::TooFewWeights(std::size_t count)
    : InvalidWeights("a weighted sum needs at least two summands, got " +
                     std::to_string(count)) {}

ZeroWeight::ZeroWeight(std::size_t index)
    : InvalidWeights("weight #" + std::to_string(index) + " is zero") {}

namespace {
std::string hypothesis_message(double formula, double numeric) {
  std::ostringstream os;
  os.precision(12);
  os << "inner radius from the max(-V_l) formula is " << formula
     << " but the order parameter changes sign at " << numeric;
  return os.str();
}
}  // namespace

HypothesisViolation::HypothesisViolation(double formula_radius, double numeric_radius)
    : Error(hypothesis_message(formula_radius, numeric_radius)),
      formula_(formula_radius),
      numeric_(numeric_radius) {}

}  // namespace cuesum
