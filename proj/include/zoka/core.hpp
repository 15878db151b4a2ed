#ifndef ZOKA_CORE_HPP
#define ZOKA_CORE_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace zoka {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Random engine used for every stochastic component. Each trial owns one.
using Rng = std::mt19937_64;

/// Bad argument: dimension mismatch, violated precondition, invalid constant.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The black-box oracle returned a nonfinite value.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation needs information the problem does not carry.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ArgumentError(message);
}

}  // namespace zoka

#endif
