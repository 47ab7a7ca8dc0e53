#ifndef LRCYCLE_ERRORS_H_
#define LRCYCLE_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrcycle {

// Vector/matrix shapes that do not fit together.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A materialized operation was requested above the size it is meant for.
class DimensionTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The dataset admits a direction with Xw >= 0 (not all zero), so the
// logistic loss has no finite minimizer. `certificate` says how this was
// established (separating direction or divergence of the solver).
class SeparableData : public std::runtime_error {
 public:
  SeparableData(const std::string& what, std::string certificate)
      : std::runtime_error(what), certificate_(std::move(certificate)) {}
  const std::string& certificate() const { return certificate_; }

 private:
  std::string certificate_;
};

// NaN/Inf encountered. `step` is the iteration index when known, else -1.
class NonFiniteValue : public std::runtime_error {
 public:
  NonFiniteValue(const std::string& what, std::int64_t step = -1)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

// Iterate norm exceeded the configured divergence bound.
class Diverged : public std::runtime_error {
 public:
  Diverged(const std::string& what, std::int64_t step)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoStationaryPoints : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Internal invariant failures: a violated lemma or a root bracket that
// cannot exist for valid inputs. These indicate bugs, not bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class BracketFailure : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class LemmaViolation : public InvariantViolation {
 public:
  LemmaViolation(const std::string& what, double w)
      : InvariantViolation(what), w_(w) {}
  double offending_w() const { return w_; }

 private:
  double w_;
};

}  // namespace lrcycle

#endif  // LRCYCLE_ERRORS_H_
