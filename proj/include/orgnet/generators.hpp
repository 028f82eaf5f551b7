#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orgnet/community.hpp"
#include "orgnet/graph.hpp"

namespace orgnet {

struct SbmSpec {
  std::vector<std::size_t> block_sizes;
  // symmetric matrix of edge probabilities, block_sizes.size() squared
  std::vector<std::vector<double>> connectivity;

  void validate() const;
  std::size_t total_nodes() const;
};

// Independent Bernoulli edges with block-pair probabilities; unit weights.
WeightedGraph sample_sbm(const SbmSpec& spec, std::uint64_t seed);

// Barabasi-Albert preferential attachment seeded with an (m+1)-clique; each
// later vertex attaches m distinct edges proportional to current degree.
// Edge count is exactly C(m+1,2) + m*(n-m-1). Requires 1 <= m < n.
WeightedGraph sample_ba(std::size_t n, std::size_t m, std::uint64_t seed);

// Block statistics measured exactly on a fitted graph under a root partition.
struct AposterioriSbmFit {
  Partition partition;
  std::vector<std::size_t> block_sizes;
  std::vector<std::uint64_t> intra_edges;            // per block
  std::map<std::pair<int, int>, std::uint64_t> inter_edges;  // k < l

  std::size_t total_nodes() const;
  std::uint64_t total_edges() const;
};

AposterioriSbmFit fit_aposteriori_sbm(const WeightedGraph& g,
                                      const Partition& p);

enum class IntraModel { er, ba };

// Fills each block against its exact vertex/edge budget with ER (uniform
// edge set) or BA (attachment m = max(1, round(avg_degree/2)), topped
// up/pruned to the budget), then places the exact observed inter-block edge
// counts between uniformly random cross-block vertex pairs.
WeightedGraph sample_root_sbm(const AposterioriSbmFit& fit, IntraModel intra,
                              std::uint64_t seed);

struct BahsbmModel {
  std::size_t n_max = 250;
  struct Leaf {
    int id = 0;
    std::size_t vertices = 0;
    std::uint64_t edge_budget = 0;  // intra-leaf edges of the fitted graph
    std::size_t m = 1;              // BA attachment parameter
  };
  std::vector<Leaf> leaves;
  struct InterCount {
    int leaf_a = 0;
    int leaf_b = 0;
    std::uint64_t count = 0;
  };
  std::vector<InterCount> inter;  // leaf_a < leaf_b, sorted

  // community tree over leaf ids, mirroring the hierarchical Leiden shape
  struct TreeNode {
    std::vector<TreeNode> children;
    int leaf_id = -1;  // >= 0 iff leaf
  };
  TreeNode hierarchy;

  std::size_t total_vertices() const;
  std::uint64_t total_intra_edges() const;
  std::uint64_t total_inter_edges() const;
};

// Hierarchical-Leiden leaves with per-leaf vertex/edge budgets and exact
// inter-leaf edge counts measured from g.
BahsbmModel fit_bahsbm(const WeightedGraph& g, std::size_t n_max = 250,
                       std::uint64_t seed = 0);
// Same fit against an already-computed hierarchy of g.
BahsbmModel fit_bahsbm(const WeightedGraph& g, const CommunityHierarchy& h,
                       std::size_t n_max);

// BA within every leaf, exact inter-leaf counts across leaf pairs; unit
// weights. Node count always equals the model total; intra edges land within
// BA rounding of each leaf budget.
WeightedGraph sample_bahsbm(const BahsbmModel& model, std::uint64_t seed);

// Kolmogorov-Smirnov distance between the weighted-degree distributions.
double degree_ks_distance(const WeightedGraph& a, const WeightedGraph& b);

struct ComparisonReport {
  std::size_t real_nodes = 0, generated_nodes = 0;
  std::size_t real_edges = 0, generated_edges = 0;
  std::uint64_t real_weight = 0, generated_weight = 0;
  double ks_degree_distance = 0.0;
  double real_avg_path = 0.0, generated_avg_path = 0.0;
  double real_q = 0.0, generated_q = 0.0;

  long long node_delta() const {
    return static_cast<long long>(generated_nodes) -
           static_cast<long long>(real_nodes);
  }
  long long edge_delta() const {
    return static_cast<long long>(generated_edges) -
           static_cast<long long>(real_edges);
  }
  double q_delta() const { return generated_q - real_q; }
  double path_delta() const { return generated_avg_path - real_avg_path; }
};

// Side-by-side report: size deltas, degree KS distance, approximate average
// path length (on each graph's largest component), and root Leiden Q under a
// shared seed.
ComparisonReport compare_graphs(const WeightedGraph& real,
                                const WeightedGraph& generated,
                                std::uint64_t seed = 0);

}  // namespace orgnet
