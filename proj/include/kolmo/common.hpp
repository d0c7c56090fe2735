#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace kolmo {

// Models are small-dimensional; fixed capacity keeps evaluators off the heap
// in the particle hot loops.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Second-order jet of a test function at a point.
struct Jet {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

/// Violated precondition or type invariant (caller bug).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// User-supplied evaluator returned something unusable (NaN, asymmetry, ...).
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad experiment configuration (file parse errors carry line anchors).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExecPolicy { Serial, Parallel };

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const Vec& v) {
  return v.allFinite();
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

}  // namespace kolmo
