#ifndef MINK_ERRORS_HPP
#define MINK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mink {

// Malformed expression text. `position` is the 0-based character offset
// of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluation left the domain of a subterm (sqrt of a negative, log of a
// nonpositive, division by zero, ...). Hard failure: checks must never
// silently integrate garbage.
class EvalDomainError : public std::runtime_error {
 public:
  explicit EvalDomainError(const std::string& message, std::string subterm = "")
      : std::runtime_error(message), subterm_(std::move(subterm)) {}
  const std::string& subterm() const { return subterm_; }

 private:
  std::string subterm_;
};

// A quantity was requested where it is undefined (tilt or mean curvature at
// a light-like point, hyperbolic angle off the space-like branch).
class UndefinedQuantityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A check that assumes a fixed causal type met a light-like sample or a
// mixed-type domain.
class CausalTypeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A gradient-bound hypothesis cannot be satisfied (no finite constant
// exists for the requested exponent).
class UnboundedFitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stated hypothesis of a check failed at a sample node.
class PreconditionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver failures. NonConvergence carries the residual history.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { CausalBreakdown, NonConvergence };
  SolverError(Kind kind, const std::string& what, std::vector<double> residual_history = {})
      : std::runtime_error(what), kind_(kind), residual_history_(std::move(residual_history)) {}
  Kind kind() const { return kind_; }
  const std::vector<double>& residual_history() const { return residual_history_; }

 private:
  Kind kind_;
  std::vector<double> residual_history_;
};

}  // namespace mink

#endif  // MINK_ERRORS_HPP
