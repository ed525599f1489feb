#include "corrclust/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "corrclust/json_io.hpp"
#include "corrclust/rng.hpp"

namespace ccl {

NormOrder NormOrder::parse(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return inf();
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse norm order '" + text + "'");
  }
  if (pos != text.size()) throw std::invalid_argument("cannot parse norm order '" + text + "'");
  if (std::isinf(v)) return inf();
  return finite(v);
}

std::string NormOrder::str() const {
  if (infinite) return "inf";
  if (value == std::floor(value) && value < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  std::ostringstream oss;
  oss << value;
  return oss.str();
}

int Clustering::cluster_count() const {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return k;
}

void Clustering::check_valid() const {
  const int k = cluster_count();
  std::vector<char> seen(k, 0);
  for (int l : labels) {
    if (l < 0 || l >= k) throw std::invalid_argument("cluster label out of range");
    seen[l] = 1;
  }
  for (int c = 0; c < k; ++c) {
    if (!seen[c]) throw std::invalid_argument("empty cluster id " + std::to_string(c));
  }
}

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> violations;
  const double lo = inst.alpha * inst.w_scale;
  const double hi = inst.w_scale;
  for (int u = 0; u < inst.n; ++u) {
    for (int v = u + 1; v < inst.n; ++v) {
      const double w = inst.wt(u, v);
      std::ostringstream msg;
      if (inst.positive(u, v)) {
        if (w < lo || w > hi) {
          msg << "positive edge (" << u << "," << v << ") weight " << w
              << " outside [" << lo << ", " << hi << "]";
          violations.push_back(msg.str());
        }
      } else {
        if (w < lo) {
          msg << "negative edge (" << u << "," << v << ") weight " << w
              << " below " << lo;
          violations.push_back(msg.str());
        }
      }
    }
  }
  return violations;
}

namespace {

Instance make_complete(int n, double alpha, double w_scale) {
  Instance inst;
  inst.n = n;
  inst.alpha = alpha;
  inst.w_scale = w_scale;
  inst.sign.assign(static_cast<std::size_t>(n) * n, 0);
  inst.weight.assign(static_cast<std::size_t>(n) * n, 0.0);
  return inst;
}

void set_edge(Instance& inst, int u, int v, std::int8_t s, double w) {
  inst.sign[static_cast<std::size_t>(u) * inst.n + v] = s;
  inst.sign[static_cast<std::size_t>(v) * inst.n + u] = s;
  inst.weight[static_cast<std::size_t>(u) * inst.n + v] = w;
  inst.weight[static_cast<std::size_t>(v) * inst.n + u] = w;
}

}  // namespace

Instance gen_gap(double alpha) {
  if (!(alpha > 0.0) || alpha > 0.25) {
    throw std::invalid_argument("gen_gap requires alpha in (0, 1/4]");
  }
  const int n = 1 + static_cast<int>(std::ceil(std::sqrt(1.0 / alpha)));
  Instance inst = make_complete(n, alpha, 1.0);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (v == u + 1) {
        set_edge(inst, u, v, +1, 1.0);  // path edge
      } else if (u == 0 && v == n - 1) {
        set_edge(inst, u, v, -1, 1.0);  // the (s, t) edge
      } else {
        set_edge(inst, u, v, +1, alpha);
      }
    }
  }
  return inst;
}

std::pair<Instance, Clustering> gen_random(int n, double alpha, int planted_k,
                                           double flip_prob, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_random requires n >= 1");
  if (planted_k < 1 || planted_k > n) throw std::invalid_argument("gen_random requires 1 <= planted_k <= n");
  if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("gen_random requires alpha in (0, 1]");
  if (!(flip_prob >= 0.0) || flip_prob >= 0.5) throw std::invalid_argument("gen_random requires flip_prob in [0, 1/2)");

  Clustering planted;
  planted.labels.resize(n);
  for (int v = 0; v < n; ++v) planted.labels[v] = v % planted_k;  // balanced round robin

  const double w = 1.0;
  Instance inst = make_complete(n, alpha, w);
  Xoshiro256ss rng(seed);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      bool positive = planted.labels[u] == planted.labels[v];
      if (rng.uniform() < flip_prob) positive = !positive;
      const double weight = alpha * w + rng.uniform() * (w - alpha * w);
      set_edge(inst, u, v, positive ? +1 : -1, weight);
    }
  }
  return {std::move(inst), std::move(planted)};
}

Instance load_instance(const std::string& path) {
  return instance_from_json(read_file(path));
}

void save_instance(const Instance& inst, const std::string& path) {
  write_file_atomic(path, instance_to_json(inst));
}

Clustering load_clustering(const std::string& path) {
  return clustering_from_json(read_file(path));
}

void save_clustering(const Clustering& c, const std::string& path) {
  write_file_atomic(path, clustering_to_json(c));
}

}  // namespace ccl
