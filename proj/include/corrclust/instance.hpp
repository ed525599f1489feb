#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "corrclust/types.hpp"

namespace ccl {

// Reports every weight-range invariant violation; empty result means valid.
std::vector<std::string> validate(const Instance& inst);

// Integrality-gap family: path of n-1 unit positive edges, one unit negative
// edge between the path endpoints, all remaining pairs positive with weight
// alpha, where n = 1 + ceil(sqrt(1/alpha)). Requires alpha <= 1/4 so that the
// endpoints are not adjacent on the path.
Instance gen_gap(double alpha);

// Planted balanced k-clustering with independent sign flips. Deterministic
// in all arguments. Returns the instance and the planted clustering.
std::pair<Instance, Clustering> gen_random(int n, double alpha, int planted_k,
                                           double flip_prob, std::uint64_t seed);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

Clustering load_clustering(const std::string& path);
void save_clustering(const Clustering& c, const std::string& path);

}  // namespace ccl
