#pragma once

#include <stdexcept>
#include <string>

namespace ssid {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnstableMatrix : Error {
  using Error::Error;
};
struct NonSymmetricInput : Error {
  using Error::Error;
};
struct DareInfeasible : Error {
  using Error::Error;
};
struct SingularQ : Error {
  using Error::Error;
};
struct InsufficientData : Error {
  using Error::Error;
};
struct InsufficientLags : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct IllConditionedShift : Error {
  using Error::Error;
};
struct SingularJ1 : Error {
  using Error::Error;
};
struct SolverFailure : Error {
  using Error::Error;
};
struct InfeasibleAtAnyGamma : SolverFailure {
  using SolverFailure::SolverFailure;
};
struct PostRepairDareFailure : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int line, int column = -1)
      : Error(msg + " (line " + std::to_string(line) +
              (column >= 0 ? ", column " + std::to_string(column) : std::string()) + ")"),
        line(line),
        column(column) {}
  int line;
  int column;
};

}  // namespace ssid
