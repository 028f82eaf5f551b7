#include "orgnet/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "orgnet/rng.hpp"

namespace orgnet {

namespace {

std::vector<std::string> make_labels(std::size_t n) {
  // zero-padded so lexicographic id order matches numeric order
  std::size_t width = 1;
  for (std::size_t v = 10; v < n; v *= 10) ++width;
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    out[i] = "v" + std::string(width - digits.size(), '0') + digits;
  }
  return out;
}

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::vector<int> labels_by_index(const WeightedGraph& g, const Partition& p) {
  if (p.assignment.size() != g.node_count())
    throw std::invalid_argument("partition does not cover the graph");
  std::vector<int> labels(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    auto it = p.assignment.find(g.node_id(v));
    if (it == p.assignment.end())
      throw std::invalid_argument("partition missing node '" + g.node_id(v) +
                                  "'");
    labels[v] = it->second;
  }
  return labels;
}

// edges within one vertex group, addressed by local indices [0, n)
struct LocalEdges {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::unordered_set<std::uint64_t> used;

  bool add(std::uint32_t a, std::uint32_t b) {
    if (a == b) return false;
    if (!used.insert(pair_key(a, b)).second) return false;
    edges.emplace_back(std::min(a, b), std::max(a, b));
    return true;
  }
};

// exactly `target` distinct pairs among n vertices, uniform over edge sets
LocalEdges sample_uniform_edge_set(std::size_t n, std::uint64_t target,
                                   Rng& rng) {
  const std::uint64_t all = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (target > all)
    throw std::invalid_argument("edge budget infeasible: " +
                                std::to_string(target) + " > C(n,2) = " +
                                std::to_string(all));
  LocalEdges out;
  if (target == 0) return out;
  if (target * 2 <= all) {
    while (out.edges.size() < target) {
      auto a = static_cast<std::uint32_t>(rng.index(n));
      auto b = static_cast<std::uint32_t>(rng.index(n));
      out.add(a, b);
    }
    return out;
  }
  // dense case: choose the excluded pairs instead
  std::unordered_set<std::uint64_t> excluded;
  while (excluded.size() < all - target) {
    auto a = static_cast<std::uint32_t>(rng.index(n));
    auto b = static_cast<std::uint32_t>(rng.index(n));
    if (a == b) continue;
    excluded.insert(pair_key(a, b));
  }
  for (std::uint32_t a = 0; a + 1 < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (!excluded.count(pair_key(a, b))) out.add(a, b);
  return out;
}

// Barabasi-Albert over local indices; returns exactly
// C(m+1,2) + m*(n-m-1) edges.
LocalEdges ba_edges(std::size_t n, std::size_t m, Rng& rng) {
  if (m < 1 || m >= n)
    throw std::invalid_argument("BA requires 1 <= m < n (m=" +
                                std::to_string(m) + ", n=" + std::to_string(n) +
                                ")");
  LocalEdges out;
  // degree-repeated endpoint list drives preferential sampling
  std::vector<std::uint32_t> repeated;
  repeated.reserve(2 * (m * n));
  for (std::uint32_t a = 0; a + 1 <= m; ++a)
    for (std::uint32_t b = a + 1; b <= m; ++b) {
      out.add(a, b);
      repeated.push_back(a);
      repeated.push_back(b);
    }
  for (std::uint32_t v = static_cast<std::uint32_t>(m) + 1; v < n; ++v) {
    std::size_t attached = 0;
    while (attached < m) {
      std::uint32_t target = repeated[rng.index(repeated.size())];
      if (out.add(v, target)) {
        repeated.push_back(target);
        ++attached;
      }
    }
    for (std::size_t k = 0; k < m; ++k) repeated.push_back(v);
  }
  return out;
}

// Adjusts a BA block to an exact edge budget: preferential top-up when short,
// uniform pruning when over.
void adjust_to_budget(LocalEdges& block, std::size_t n, std::uint64_t budget,
                      Rng& rng) {
  const std::uint64_t all = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (budget > all)
    throw std::invalid_argument("edge budget infeasible: " +
                                std::to_string(budget) + " > C(n,2)");
  while (block.edges.size() > budget) {
    std::size_t e = rng.index(block.edges.size());
    auto [a, b] = block.edges[e];
    block.used.erase(pair_key(a, b));
    block.edges[e] = block.edges.back();
    block.edges.pop_back();
  }
  if (block.edges.size() >= budget) return;
  std::vector<std::uint32_t> repeated;
  repeated.reserve(2 * block.edges.size());
  for (auto [a, b] : block.edges) {
    repeated.push_back(a);
    repeated.push_back(b);
  }
  int stalls = 0;
  while (block.edges.size() < budget) {
    std::uint32_t a, b;
    if (repeated.size() >= 2 && stalls < 200) {
      a = repeated[rng.index(repeated.size())];
      b = repeated[rng.index(repeated.size())];
    } else {
      a = static_cast<std::uint32_t>(rng.index(n));
      b = static_cast<std::uint32_t>(rng.index(n));
    }
    if (block.add(a, b)) {
      repeated.push_back(a);
      repeated.push_back(b);
      stalls = 0;
    } else {
      ++stalls;
    }
  }
}

std::size_t ba_parameter(std::size_t vertices, std::uint64_t edge_budget) {
  if (vertices < 2) return 1;
  double avg_degree =
      2.0 * static_cast<double>(edge_budget) / static_cast<double>(vertices);
  auto m = static_cast<std::size_t>(std::lround(std::max(1.0, avg_degree / 2.0)));
  return std::clamp<std::size_t>(m, 1, vertices - 1);
}

// intra edges for one block: BA topped up / pruned to the budget, or the
// forced edge set for blocks too small for BA
LocalEdges ba_block(std::size_t n, std::uint64_t budget, std::size_t m,
                    Rng& rng) {
  const std::uint64_t all =
      n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (budget > all)
    throw std::invalid_argument("edge budget infeasible: " +
                                std::to_string(budget) + " > C(n,2) = " +
                                std::to_string(all));
  LocalEdges out;
  if (n < 3) {
    if (n == 2 && budget == 1) out.add(0, 1);
    return out;
  }
  if (budget == 0) return out;
  out = ba_edges(n, std::min<std::size_t>(m, n - 1), rng);
  adjust_to_budget(out, n, budget, rng);
  return out;
}

}  // namespace

void SbmSpec::validate() const {
  const std::size_t k = block_sizes.size();
  if (k == 0) throw std::invalid_argument("SBM spec has no blocks");
  for (std::size_t s : block_sizes)
    if (s < 1) throw std::invalid_argument("SBM block sizes must be >= 1");
  if (connectivity.size() != k)
    throw std::invalid_argument("connectivity matrix must be KxK");
  for (std::size_t i = 0; i < k; ++i) {
    if (connectivity[i].size() != k)
      throw std::invalid_argument("connectivity matrix must be KxK");
    for (std::size_t j = 0; j < k; ++j) {
      double p = connectivity[i][j];
      if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("edge probabilities must be in [0,1]");
      if (connectivity[j][i] != p)
        throw std::invalid_argument("connectivity matrix must be symmetric");
    }
  }
}

std::size_t SbmSpec::total_nodes() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(),
                         std::size_t{0});
}

WeightedGraph sample_sbm(const SbmSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.total_nodes();
  std::vector<std::string> ids = make_labels(n);
  std::vector<int> block_of(n);
  {
    std::size_t at = 0;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b)
      for (std::size_t i = 0; i < spec.block_sizes[b]; ++i)
        block_of[at++] = static_cast<int>(b);
  }
  Rng rng(mix_seed(seed, 0x73626dULL));
  std::vector<WeightedPair> pairs;
  for (std::size_t u = 0; u + 1 < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      double p = spec.connectivity[block_of[u]][block_of[v]];
      if (p >= 1.0 || (p > 0.0 && rng.unit() < p))
        pairs.push_back({ids[u], ids[v], 1});
    }
  }
  return build_graph(ids, pairs);
}

WeightedGraph sample_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m >= n)
    throw std::invalid_argument("sample_ba requires 1 <= m < n");
  Rng rng(mix_seed(seed, 0x6261ULL));
  LocalEdges edges = ba_edges(n, m, rng);
  std::vector<std::string> ids = make_labels(n);
  std::vector<WeightedPair> pairs;
  pairs.reserve(edges.edges.size());
  for (auto [a, b] : edges.edges) pairs.push_back({ids[a], ids[b], 1});
  return build_graph(ids, pairs);
}

std::size_t AposterioriSbmFit::total_nodes() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(),
                         std::size_t{0});
}

std::uint64_t AposterioriSbmFit::total_edges() const {
  std::uint64_t t = std::accumulate(intra_edges.begin(), intra_edges.end(),
                                    std::uint64_t{0});
  for (const auto& [key, c] : inter_edges) t += c;
  return t;
}

AposterioriSbmFit fit_aposteriori_sbm(const WeightedGraph& g,
                                      const Partition& p) {
  AposterioriSbmFit fit;
  fit.partition = p;
  std::vector<int> labels = labels_by_index(g, p);
  fit.block_sizes.assign(p.community_count, 0);
  fit.intra_edges.assign(p.community_count, 0);
  for (int l : labels) ++fit.block_sizes[l];
  g.for_each_edge([&](std::uint32_t u, std::uint32_t v, std::uint64_t) {
    int a = labels[u], b = labels[v];
    if (a == b) {
      ++fit.intra_edges[a];
    } else {
      if (a > b) std::swap(a, b);
      ++fit.inter_edges[{a, b}];
    }
  });
  return fit;
}

namespace {

// shared by root-SBM and BA-HSBM sampling: blocks with (size, budget, m or
// ER), plus exact inter-block counts
WeightedGraph assemble_blocks(
    const std::vector<std::size_t>& sizes,
    const std::vector<std::uint64_t>& budgets,
    const std::vector<std::size_t>& ms,  // empty => ER blocks
    const std::map<std::pair<int, int>, std::uint64_t>& inter,
    std::uint64_t seed) {
  const std::size_t k = sizes.size();
  std::vector<std::size_t> base(k + 1, 0);
  for (std::size_t b = 0; b < k; ++b) base[b + 1] = base[b] + sizes[b];
  const std::size_t n = base[k];
  std::vector<std::string> ids = make_labels(n);
  std::vector<WeightedPair> pairs;

  for (std::size_t b = 0; b < k; ++b) {
    Rng rng(mix_seed(seed, 0xb10c0000ULL + b));
    LocalEdges edges =
        ms.empty() ? sample_uniform_edge_set(sizes[b], budgets[b], rng)
                   : ba_block(sizes[b], budgets[b], ms[b], rng);
    for (auto [a, c] : edges.edges)
      pairs.push_back({ids[base[b] + a], ids[base[b] + c], 1});
  }

  std::size_t pair_index = 0;
  for (const auto& [key, count] : inter) {
    auto [a, b] = key;
    if (a < 0 || b < 0 || static_cast<std::size_t>(b) >= k || a >= b)
      throw std::invalid_argument("invalid inter-block pair");
    const std::uint64_t possible =
        static_cast<std::uint64_t>(sizes[a]) * sizes[b];
    if (count > possible)
      throw std::invalid_argument(
          "inter-block budget infeasible: " + std::to_string(count) + " > " +
          std::to_string(possible) + " possible pairs");
    Rng rng(mix_seed(seed, 0x1e7e0000ULL + pair_index++));
    std::unordered_set<std::uint64_t> used;
    while (used.size() < count) {
      auto u = static_cast<std::uint32_t>(base[a] + rng.index(sizes[a]));
      auto v = static_cast<std::uint32_t>(base[b] + rng.index(sizes[b]));
      if (used.insert(pair_key(u, v)).second) pairs.push_back({ids[u], ids[v], 1});
    }
  }
  return build_graph(ids, pairs);
}

}  // namespace

WeightedGraph sample_root_sbm(const AposterioriSbmFit& fit, IntraModel intra,
                              std::uint64_t seed) {
  std::vector<std::size_t> ms;
  if (intra == IntraModel::ba) {
    ms.resize(fit.block_sizes.size());
    for (std::size_t b = 0; b < fit.block_sizes.size(); ++b)
      ms[b] = ba_parameter(fit.block_sizes[b], fit.intra_edges[b]);
  }
  return assemble_blocks(fit.block_sizes, fit.intra_edges, ms, fit.inter_edges,
                         mix_seed(seed, 0x726f6f74ULL));
}

std::size_t BahsbmModel::total_vertices() const {
  std::size_t t = 0;
  for (const auto& l : leaves) t += l.vertices;
  return t;
}

std::uint64_t BahsbmModel::total_intra_edges() const {
  std::uint64_t t = 0;
  for (const auto& l : leaves) t += l.edge_budget;
  return t;
}

std::uint64_t BahsbmModel::total_inter_edges() const {
  std::uint64_t t = 0;
  for (const auto& i : inter) t += i.count;
  return t;
}

namespace {

BahsbmModel::TreeNode mirror_tree(const CommunityHierarchy::Node& node,
                                  int& next_leaf) {
  BahsbmModel::TreeNode out;
  if (node.is_leaf()) {
    out.leaf_id = next_leaf++;
    return out;
  }
  out.children.reserve(node.children.size());
  for (const auto& c : node.children) out.children.push_back(mirror_tree(c, next_leaf));
  return out;
}

}  // namespace

BahsbmModel fit_bahsbm(const WeightedGraph& g, std::size_t n_max,
                       std::uint64_t seed) {
  if (g.node_count() == 0) throw std::invalid_argument("empty graph");
  return fit_bahsbm(g, hierarchical_leiden(g, n_max, seed), n_max);
}

BahsbmModel fit_bahsbm(const WeightedGraph& g, const CommunityHierarchy& h,
                       std::size_t n_max) {
  BahsbmModel model;
  model.n_max = n_max;
  // leaf ids follow the hierarchy's depth-first leaf order
  int next_leaf = 0;
  model.hierarchy = mirror_tree(h.root, next_leaf);

  Partition leaf_part = h.leaf_partition();
  std::vector<int> leaf_of = labels_by_index(g, leaf_part);
  // leaf_partition labels leaves in the same DFS order used by mirror_tree
  model.leaves.resize(leaf_part.community_count);
  for (int i = 0; i < leaf_part.community_count; ++i) model.leaves[i].id = i;
  for (int l : leaf_of) ++model.leaves[l].vertices;

  std::map<std::pair<int, int>, std::uint64_t> inter;
  g.for_each_edge([&](std::uint32_t u, std::uint32_t v, std::uint64_t) {
    int a = leaf_of[u], b = leaf_of[v];
    if (a == b) {
      ++model.leaves[a].edge_budget;
    } else {
      if (a > b) std::swap(a, b);
      ++inter[{a, b}];
    }
  });
  for (auto& leaf : model.leaves)
    leaf.m = ba_parameter(leaf.vertices, leaf.edge_budget);
  for (const auto& [key, count] : inter)
    model.inter.push_back({key.first, key.second, count});
  return model;
}

WeightedGraph sample_bahsbm(const BahsbmModel& model, std::uint64_t seed) {
  std::vector<std::size_t> sizes, ms;
  std::vector<std::uint64_t> budgets;
  for (const auto& leaf : model.leaves) {
    sizes.push_back(leaf.vertices);
    budgets.push_back(leaf.edge_budget);
    ms.push_back(leaf.m);
  }
  std::map<std::pair<int, int>, std::uint64_t> inter;
  for (const auto& i : model.inter) inter[{i.leaf_a, i.leaf_b}] = i.count;
  return assemble_blocks(sizes, budgets, ms, inter,
                         mix_seed(seed, 0xba50ULL));
}

double degree_ks_distance(const WeightedGraph& a, const WeightedGraph& b) {
  auto degrees = [](const WeightedGraph& g) {
    std::vector<std::uint64_t> d(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) d[v] = g.weighted_degree(v);
    std::sort(d.begin(), d.end());
    return d;
  };
  std::vector<std::uint64_t> da = degrees(a), db = degrees(b);
  if (da.empty() || db.empty())
    throw std::invalid_argument("KS distance needs non-empty graphs");
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(da.size());
  const double nb = static_cast<double>(db.size());
  while (i < da.size() && j < db.size()) {
    std::uint64_t x = std::min(da[i], db[j]);
    while (i < da.size() && da[i] == x) ++i;
    while (j < db.size() && db[j] == x) ++j;
    ks = std::max(ks, std::fabs(i / na - j / nb));
  }
  return ks;
}

ComparisonReport compare_graphs(const WeightedGraph& real,
                                const WeightedGraph& generated,
                                std::uint64_t seed) {
  ComparisonReport r;
  r.real_nodes = real.node_count();
  r.generated_nodes = generated.node_count();
  r.real_edges = real.edge_count();
  r.generated_edges = generated.edge_count();
  r.real_weight = real.total_weight();
  r.generated_weight = generated.total_weight();
  r.ks_degree_distance = degree_ks_distance(real, generated);

  const std::uint64_t path_seed = mix_seed(seed, 0x70617468ULL);
  auto avg_path = [&](const WeightedGraph& g) {
    WeightedGraph lcc = largest_connected_component(g);
    if (lcc.node_count() < 2) return 0.0;
    return approx_avg_path_length(lcc, 32, path_seed);
  };
  r.real_avg_path = avg_path(real);
  r.generated_avg_path = avg_path(generated);

  const std::uint64_t q_seed = mix_seed(seed, 0x6d6f64ULL);
  r.real_q = modularity(real, leiden(real, 1.0, q_seed));
  r.generated_q = modularity(generated, leiden(generated, 1.0, q_seed));
  return r;
}

}  // namespace orgnet
