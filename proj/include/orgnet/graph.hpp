#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace orgnet {

struct WeightedPair {
  std::string u;
  std::string v;
  std::int64_t count = 0;
};

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::uint64_t total_weight = 0;
  double mean_weighted_degree = 0.0;  // degree_sum / node_count

  bool operator==(const GraphStats&) const = default;
};

// Immutable undirected weighted graph. Node ids are opaque strings mapped to
// dense indices in lexicographic id order. Weights are positive integer
// message counts; no self-loops, at most one edge per unordered pair.
// Isolated nodes are allowed (they can arise from induced subgraphs or
// explicit node sets).
class WeightedGraph {
 public:
  struct Neighbor {
    std::uint32_t node;
    std::uint64_t weight;
  };

  WeightedGraph() = default;

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_u_.size(); }
  std::uint64_t total_weight() const { return total_weight_; }
  // L = sum of weighted degrees = 2 * total edge weight
  std::uint64_t degree_sum() const { return 2 * total_weight_; }

  const std::string& node_id(std::size_t idx) const { return ids_[idx]; }
  const std::vector<std::string>& node_ids() const { return ids_; }
  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t weighted_degree(std::size_t idx) const { return degree_[idx]; }

  std::span<const Neighbor> neighbors(std::size_t idx) const {
    return {adj_.data() + off_[idx], adj_.data() + off_[idx + 1]};
  }

  std::optional<std::uint64_t> edge_weight(std::size_t u, std::size_t v) const;

  // fn(u_idx, v_idx, weight) with u_idx < v_idx, edges in canonical order
  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    for (std::size_t e = 0; e < edge_u_.size(); ++e)
      fn(edge_u_[e], edge_v_[e], edge_w_[e]);
  }

  GraphStats stats() const {
    return {node_count(), edge_count(), total_weight(),
            node_count() ? static_cast<double>(degree_sum()) / static_cast<double>(node_count())
                         : 0.0};
  }

  bool operator==(const WeightedGraph& other) const {
    return ids_ == other.ids_ && edge_u_ == other.edge_u_ &&
           edge_v_ == other.edge_v_ && edge_w_ == other.edge_w_;
  }

 private:
  friend class GraphBuilder;

  std::vector<std::string> ids_;  // lexicographically sorted
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> off_;  // CSR offsets, size n+1
  std::vector<Neighbor> adj_;
  std::vector<std::uint32_t> edge_u_, edge_v_;  // canonical edge list, u < v
  std::vector<std::uint64_t> edge_w_;
  std::vector<std::uint64_t> degree_;
  std::uint64_t total_weight_ = 0;
};

// Accumulates (u, v, count) contributions; (u,v) and (v,u) sum into one
// undirected edge, self-pairs are dropped. Counts must be >= 1.
class GraphBuilder {
 public:
  void add(const std::string& u, const std::string& v, std::int64_t count);
  void add_node(const std::string& id);
  WeightedGraph build() &&;

 private:
  std::uint32_t intern(const std::string& id);

  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::unordered_map<std::uint64_t, std::uint64_t> weights_;  // key (min<<32)|max
};

WeightedGraph build_graph(const std::vector<WeightedPair>& pairs);
// Explicit node set; nodes without edges stay as isolated vertices.
WeightedGraph build_graph(const std::vector<std::string>& nodes,
                          const std::vector<WeightedPair>& pairs);

// Induced subgraph on the largest connected component. Ties between
// equal-sized components go to the one containing the lexicographically
// smallest node id. Empty input yields an empty graph.
WeightedGraph largest_connected_component(const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);

WeightedGraph induced_subgraph(const WeightedGraph& g,
                               const std::unordered_set<std::string>& keep);

enum class MissingNodePolicy { error, drop };

// Predicate over a node attribute table: keeps nodes whose label satisfies
// keep_label. Nodes absent from the table follow the missing policy.
WeightedGraph induced_subgraph(
    const WeightedGraph& g,
    const std::unordered_map<std::string, std::string>& attributes,
    const std::function<bool(const std::string&)>& keep_label,
    MissingNodePolicy missing = MissingNodePolicy::error);

struct DegreeHistogram {
  struct Bin {
    std::uint64_t lo;  // [lo, hi)
    std::uint64_t hi;
    std::size_t count;
  };
  bool log_binned = false;
  std::vector<Bin> bins;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& b : bins) t += b.count;
    return t;
  }
};

// Histogram over weighted degrees. Linear mode: one bin per occupied degree
// value. Log mode: base-2 geometric bins [2^k, 2^(k+1)), with a [0,1) bin for
// isolated nodes.
DegreeHistogram degree_histogram(const WeightedGraph& g, bool log_binned);

// Mean unweighted BFS distance from sample_size uniformly chosen source nodes
// to all other nodes. Requires a connected graph.
double approx_avg_path_length(const WeightedGraph& g, std::size_t sample_size,
                              std::uint64_t seed);

}  // namespace orgnet
