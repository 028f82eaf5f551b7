#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orgnet/graph.hpp"

namespace orgnet {

// Node -> community assignment with labels normalized to 0..k-1.
struct Partition {
  std::map<std::string, int> assignment;
  int community_count = 0;

  static Partition from_labels(const std::vector<std::string>& ids,
                               const std::vector<int>& labels);

  std::vector<std::vector<std::string>> communities() const;
  bool operator==(const Partition&) const = default;
};

// Q(g, p) = (1/L) * sum_{u,v} (A_uv - d_u d_v / L) [p(u) == p(v)], the sum
// over ordered node pairs with zero diagonal; resolution scales the null
// term. Returns 0 for edgeless graphs.
double modularity(const WeightedGraph& g, const Partition& p,
                  double resolution = 1.0);

// Seeded Leiden community detection (move / refine / aggregate until the
// modularity gain drops below 1e-10). Deterministic given (g, resolution,
// seed); final communities are internally connected.
Partition leiden(const WeightedGraph& g, double resolution = 1.0,
                 std::uint64_t seed = 0);

struct CommunityHierarchy {
  struct Node {
    std::vector<Node> children;        // empty iff leaf
    std::vector<std::string> members;  // populated on leaves only
    bool is_leaf() const { return children.empty(); }
  };

  Node root;      // children are the root-level Leiden communities
  int depth = 0;  // deepest chain of Leiden/fallback passes

  std::vector<std::vector<std::string>> leaves() const;
  Partition leaf_partition() const;
};

// Runs Leiden recursively on every community larger than n_max until all
// leaves fit. Communities Leiden fails to split are bisected by degree rank.
CommunityHierarchy hierarchical_leiden(const WeightedGraph& g,
                                       std::size_t n_max = 250,
                                       std::uint64_t seed = 0);

}  // namespace orgnet
