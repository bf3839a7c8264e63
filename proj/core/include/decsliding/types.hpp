#ifndef DECSLIDING_TYPES_HPP
#define DECSLIDING_TYPES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace decsliding {

using Vector = Eigen::VectorXd;

/// One vector per agent, indexed by agent id. All entries share a dimension.
using AgentVectors = std::vector<Vector>;

using AgentId = int;

// Error taxonomy. Callers that only care about "something went wrong" can
// catch std::exception; the harness maps each kind to a distinct message.

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScheduleInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReferenceNotConvergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ArgumentError unless every vector in xs has dimension dim.
void require_dimension(const AgentVectors& xs, Eigen::Index dim, const char* where);

/// Euclidean norm of the stacked vector (x_1; ...; x_m).
double stacked_norm(const AgentVectors& xs);

}  // namespace decsliding

#endif
