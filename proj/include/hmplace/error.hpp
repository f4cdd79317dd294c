#pragma once

#include <stdexcept>
#include <string>

namespace hmplace {

// Every failure the library reports carries a short machine-parsable kind
// ("validation", "infeasible-eviction", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error("validation", m) {}
};

struct NoAttributedSamples : Error {
  explicit NoAttributedSamples(const std::string& m) : Error("no-attributed-samples", m) {}
};

struct CalibrationError : Error {
  explicit CalibrationError(const std::string& m) : Error("invalid-calibration", m) {}
};

struct NotReferenced : Error {
  explicit NotReferenced(const std::string& m) : Error("not-referenced", m) {}
};

struct InfeasibleEviction : Error {
  explicit InfeasibleEviction(const std::string& m) : Error("infeasible-eviction", m) {}
};

struct SimulationError : Error {
  explicit SimulationError(const std::string& m) : Error("simulation", m) {}
};

struct PlanningError : Error {
  explicit PlanningError(const std::string& m) : Error("planning", m) {}
};

}  // namespace hmplace
