#pragma once

#include <utility>
#include <vector>

namespace ccl {

// Sorted disjoint half-open intervals [a, b). Supports the measure-preserving
// pushdown pi (prefix measure) and its right inverse. A query y that lands
// exactly on an interval-image endpoint resolves to the infimum of the next
// interval's interior; y equal to the total measure resolves to the right
// end of the last interval.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<std::pair<double, double>> intervals);

  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
  double measure() const { return measure_; }
  bool empty() const { return intervals_.empty(); }
  bool contains(double x) const;

  // pi(x) = mu([0, x] intersect S). 1-Lipschitz, non-decreasing.
  double pi_forward(double x) const;

  // Right inverse: pi(pi_inverse(y)) == y for y in [0, measure()].
  // Throws std::out_of_range for y outside that range.
  double pi_inverse(double y) const;

 private:
  std::vector<std::pair<double, double>> intervals_;
  std::vector<double> prefix_;  // prefix_[i] = measure of intervals_[0..i)
  double measure_ = 0.0;
};

}  // namespace ccl
