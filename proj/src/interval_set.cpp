#include "corrclust/interval_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccl {

IntervalSet::IntervalSet(std::vector<std::pair<double, double>> intervals)
    : intervals_(std::move(intervals)) {
  std::sort(intervals_.begin(), intervals_.end());
  double last_end = -1.0;
  for (const auto& [a, b] : intervals_) {
    if (!(a < b)) throw std::invalid_argument("IntervalSet: empty or reversed interval");
    if (a < last_end) throw std::invalid_argument("IntervalSet: overlapping intervals");
    last_end = b;
  }
  prefix_.resize(intervals_.size() + 1);
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    prefix_[i + 1] = prefix_[i] + (intervals_[i].second - intervals_[i].first);
  }
  measure_ = prefix_.empty() ? 0.0 : prefix_.back();
}

bool IntervalSet::contains(double x) const {
  for (const auto& [a, b] : intervals_) {
    if (x >= a && x < b) return true;
  }
  // the last interval is closed on the right at the domain end
  return !intervals_.empty() && x == intervals_.back().second;
}

double IntervalSet::pi_forward(double x) const {
  double acc = 0.0;
  for (const auto& [a, b] : intervals_) {
    if (x <= a) break;
    acc += std::min(x, b) - a;
  }
  return acc;
}

double IntervalSet::pi_inverse(double y) const {
  if (y < 0.0 || y > measure_) throw std::out_of_range("pi_inverse: y outside [0, mu(S)]");
  if (intervals_.empty()) throw std::out_of_range("pi_inverse: empty set");
  if (y == measure_) return intervals_.back().second;
  // first interval whose image strictly contains y on the right
  const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), y);
  const std::size_t idx = static_cast<std::size_t>(it - prefix_.begin()) - 1;
  return intervals_[idx].first + (y - prefix_[idx]);
}

}  // namespace ccl
