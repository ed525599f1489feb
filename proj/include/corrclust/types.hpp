#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccl {

// Norm order p in [1, inf].
struct NormOrder {
  double value = 2.0;
  bool infinite = false;

  static NormOrder inf() { return NormOrder{0.0, true}; }
  static NormOrder finite(double p) {
    if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("norm order must be a real >= 1 or inf");
    return NormOrder{p, false};
  }
  static NormOrder parse(const std::string& text);
  std::string str() const;

  bool operator==(const NormOrder& o) const {
    return infinite == o.infinite && (infinite || value == o.value);
  }
};

struct Clustering {
  std::vector<int> labels;  // 0-based, contiguous cluster ids

  int size() const { return static_cast<int>(labels.size()); }
  int cluster_count() const;
  void check_valid() const;  // throws on non-contiguous or empty clusters
};

// Complete signed weighted graph with asymmetric classification errors.
// sign and weight are dense n x n row-major; diagonal entries are 0 and
// carry no meaning. Immutable after construction by convention.
struct Instance {
  int n = 0;
  double alpha = 1.0;   // asymmetry parameter in (0, 1]
  double w_scale = 1.0; // weight scale w
  std::vector<std::int8_t> sign;  // +1 / -1 off diagonal
  std::vector<double> weight;     // positive off diagonal

  std::int8_t sgn(int u, int v) const { return sign[static_cast<std::size_t>(u) * n + v]; }
  double wt(int u, int v) const { return weight[static_cast<std::size_t>(u) * n + v]; }
  bool positive(int u, int v) const { return sgn(u, v) > 0; }
};

// Dense symmetric n x n matrix stored row-major.
using Matrix = std::vector<double>;

inline double& mat_at(Matrix& m, int n, int u, int v) { return m[static_cast<std::size_t>(u) * n + v]; }
inline double mat_at(const Matrix& m, int n, int u, int v) { return m[static_cast<std::size_t>(u) * n + v]; }

// Error raised when a strict-mode theorem guarantee fails at runtime.
class guarantee_violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccl
