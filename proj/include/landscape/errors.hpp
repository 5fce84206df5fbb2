#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace landscape {

// Invalid law, geometry, or configuration. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Site or node outside its container.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Linear solver failure. Maps to CLI exit code 3.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

// A computed field broke an invariant the model guarantees (e.g. positivity).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace landscape
