#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace trunctest {

/// Violated operation precondition (dimension mismatch, parameter out of range, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rejection sampling ran out of proposal budget before collecting the
/// requested number of accepted samples.
class SamplingEfficiencyError : public std::runtime_error {
 public:
  SamplingEfficiencyError(std::string msg, double acceptance_rate, std::int64_t proposals_used)
      : std::runtime_error(std::move(msg)),
        acceptance_rate(acceptance_rate),
        proposals_used(proposals_used) {}

  double acceptance_rate;
  std::int64_t proposals_used;
};

/// Monte-Carlo mass estimation saw zero hits: the set looks null under the
/// proposal distribution.
class NullSetError : public std::runtime_error {
 public:
  NullSetError(std::string msg, std::int64_t budget_used)
      : std::runtime_error(std::move(msg)), budget_used(budget_used) {}

  std::int64_t budget_used;
};

/// calibrate_constants could not reach the target accept rate on any ladder value.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trunctest
