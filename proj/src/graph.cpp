#include "orgnet/graph.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "orgnet/rng.hpp"

namespace orgnet {

void GraphBuilder::add_node(const std::string& id) { intern(id); }

std::uint32_t GraphBuilder::intern(const std::string& id) {
  auto it = index_.find(id);
  if (it != index_.end()) return it->second;
  auto idx = static_cast<std::uint32_t>(ids_.size());
  ids_.push_back(id);
  index_.emplace(id, idx);
  return idx;
}

void GraphBuilder::add(const std::string& u, const std::string& v,
                       std::int64_t count) {
  if (count <= 0)
    throw std::invalid_argument("edge count must be positive, got " +
                                std::to_string(count) + " for (" + u + "," + v +
                                ")");
  std::uint32_t ui = intern(u);
  std::uint32_t vi = intern(v);
  if (ui == vi) return;  // self-loops are dropped
  std::uint32_t a = std::min(ui, vi), b = std::max(ui, vi);
  weights_[(static_cast<std::uint64_t>(a) << 32) | b] +=
      static_cast<std::uint64_t>(count);
}

WeightedGraph GraphBuilder::build() && {
  WeightedGraph g;
  const std::size_t n = ids_.size();

  // remap to lexicographic id order so graphs built from permuted input are
  // identical
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return ids_[a] < ids_[b];
  });
  std::vector<std::uint32_t> rank(n);
  g.ids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[order[i]] = static_cast<std::uint32_t>(i);
    g.ids_[i] = std::move(ids_[order[i]]);
    g.index_.emplace(g.ids_[i], i);
  }

  struct Edge {
    std::uint32_t u, v;
    std::uint64_t w;
  };
  std::vector<Edge> edges;
  edges.reserve(weights_.size());
  for (const auto& [key, w] : weights_) {
    std::uint32_t a = rank[static_cast<std::uint32_t>(key >> 32)];
    std::uint32_t b = rank[static_cast<std::uint32_t>(key & 0xffffffffu)];
    if (a > b) std::swap(a, b);
    edges.push_back({a, b, w});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.u != y.u ? x.u < y.u : x.v < y.v;
  });

  g.edge_u_.reserve(edges.size());
  g.edge_v_.reserve(edges.size());
  g.edge_w_.reserve(edges.size());
  g.degree_.assign(n, 0);
  std::vector<std::size_t> deg_count(n, 0);
  for (const Edge& e : edges) {
    g.edge_u_.push_back(e.u);
    g.edge_v_.push_back(e.v);
    g.edge_w_.push_back(e.w);
    g.degree_[e.u] += e.w;
    g.degree_[e.v] += e.w;
    ++deg_count[e.u];
    ++deg_count[e.v];
    g.total_weight_ += e.w;
  }

  g.off_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.off_[i + 1] = g.off_[i] + deg_count[i];
  g.adj_.resize(2 * edges.size());
  std::vector<std::size_t> cursor(g.off_.begin(), g.off_.end() - 1);
  for (const Edge& e : edges) {
    g.adj_[cursor[e.u]++] = {e.v, e.w};
    g.adj_[cursor[e.v]++] = {e.u, e.w};
  }
  return g;
}

WeightedGraph build_graph(const std::vector<WeightedPair>& pairs) {
  GraphBuilder b;
  for (const auto& p : pairs) b.add(p.u, p.v, p.count);
  return std::move(b).build();
}

WeightedGraph build_graph(const std::vector<std::string>& nodes,
                          const std::vector<WeightedPair>& pairs) {
  GraphBuilder b;
  for (const auto& id : nodes) b.add_node(id);
  for (const auto& p : pairs) b.add(p.u, p.v, p.count);
  return std::move(b).build();
}

std::optional<std::uint64_t> WeightedGraph::edge_weight(std::size_t u,
                                                        std::size_t v) const {
  for (const Neighbor& nb : neighbors(u))
    if (nb.node == v) return nb.weight;
  return std::nullopt;
}

namespace {

// component label per node via BFS; returns labels and component count
std::pair<std::vector<std::uint32_t>, std::size_t> components(
    const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> label(n, UINT32_MAX);
  std::size_t count = 0;
  std::vector<std::uint32_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != UINT32_MAX) continue;
    auto c = static_cast<std::uint32_t>(count++);
    label[s] = c;
    stack.push_back(static_cast<std::uint32_t>(s));
    while (!stack.empty()) {
      std::uint32_t v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (label[nb.node] == UINT32_MAX) {
          label[nb.node] = c;
          stack.push_back(nb.node);
        }
      }
    }
  }
  return {std::move(label), count};
}

WeightedGraph subgraph_by_index(const WeightedGraph& g,
                                const std::vector<bool>& keep) {
  GraphBuilder b;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (keep[v]) b.add_node(g.node_id(v));
  g.for_each_edge([&](std::uint32_t u, std::uint32_t v, std::uint64_t w) {
    if (keep[u] && keep[v])
      b.add(g.node_id(u), g.node_id(v), static_cast<std::int64_t>(w));
  });
  return std::move(b).build();
}

}  // namespace

WeightedGraph largest_connected_component(const WeightedGraph& g) {
  if (g.node_count() == 0) return {};
  auto [label, count] = components(g);
  std::vector<std::size_t> size(count, 0);
  for (std::uint32_t c : label) ++size[c];
  // node indices are in lexicographic id order, so the tie-break on smallest
  // minimum id reduces to smallest first index
  std::uint32_t best = 0;
  std::vector<std::int64_t> first_index(count, -1);
  for (std::size_t v = 0; v < label.size(); ++v)
    if (first_index[label[v]] < 0) first_index[label[v]] = static_cast<std::int64_t>(v);
  for (std::uint32_t c = 1; c < count; ++c) {
    if (size[c] > size[best] ||
        (size[c] == size[best] && first_index[c] < first_index[best]))
      best = c;
  }
  std::vector<bool> keep(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) keep[v] = label[v] == best;
  return subgraph_by_index(g, keep);
}

bool is_connected(const WeightedGraph& g) {
  if (g.node_count() == 0) return true;
  auto [label, count] = components(g);
  (void)label;
  return count == 1;
}

WeightedGraph induced_subgraph(const WeightedGraph& g,
                               const std::unordered_set<std::string>& keep) {
  std::vector<bool> mask(g.node_count(), false);
  for (std::size_t v = 0; v < g.node_count(); ++v)
    mask[v] = keep.count(g.node_id(v)) > 0;
  return subgraph_by_index(g, mask);
}

WeightedGraph induced_subgraph(
    const WeightedGraph& g,
    const std::unordered_map<std::string, std::string>& attributes,
    const std::function<bool(const std::string&)>& keep_label,
    MissingNodePolicy missing) {
  std::vector<bool> mask(g.node_count(), false);
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    auto it = attributes.find(g.node_id(v));
    if (it == attributes.end()) {
      if (missing == MissingNodePolicy::error)
        throw std::runtime_error("node '" + g.node_id(v) +
                                 "' missing from attribute table");
      continue;  // drop
    }
    mask[v] = keep_label(it->second);
  }
  return subgraph_by_index(g, mask);
}

DegreeHistogram degree_histogram(const WeightedGraph& g, bool log_binned) {
  DegreeHistogram h;
  h.log_binned = log_binned;
  if (g.node_count() == 0) return h;
  if (!log_binned) {
    std::vector<std::uint64_t> degrees;
    degrees.reserve(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v)
      degrees.push_back(g.weighted_degree(v));
    std::sort(degrees.begin(), degrees.end());
    for (std::size_t i = 0; i < degrees.size();) {
      std::size_t j = i;
      while (j < degrees.size() && degrees[j] == degrees[i]) ++j;
      h.bins.push_back({degrees[i], degrees[i] + 1, j - i});
      i = j;
    }
    return h;
  }
  // base-2 geometric bins; index 0 holds degree 0, index k holds
  // [2^(k-1), 2^k)
  std::vector<std::size_t> counts;
  auto bin_of = [](std::uint64_t d) -> std::size_t {
    if (d == 0) return 0;
    std::size_t k = 1;
    while ((1ull << k) <= d) ++k;
    return k;
  };
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    std::size_t b = bin_of(g.weighted_degree(v));
    if (counts.size() <= b) counts.resize(b + 1, 0);
    ++counts[b];
  }
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0) continue;
    std::uint64_t lo = b == 0 ? 0 : (1ull << (b - 1));
    std::uint64_t hi = b == 0 ? 1 : (1ull << b);
    h.bins.push_back({lo, hi, counts[b]});
  }
  return h;
}

double approx_avg_path_length(const WeightedGraph& g, std::size_t sample_size,
                              std::uint64_t seed) {
  if (g.node_count() < 2)
    throw std::invalid_argument("path length needs at least 2 nodes");
  if (sample_size < 1) throw std::invalid_argument("sample_size must be >= 1");
  if (!is_connected(g))
    throw std::runtime_error(
        "graph is disconnected; extract the largest connected component "
        "first");

  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> sources(n);
  std::iota(sources.begin(), sources.end(), 0u);
  if (sample_size < n) {
    Rng rng(seed);
    rng.shuffle(sources);
    sources.resize(sample_size);
    std::sort(sources.begin(), sources.end());
  }

  std::vector<std::uint32_t> dist(n);
  std::vector<std::uint32_t> frontier, next;
  unsigned long long total = 0, pairs = 0;
  for (std::uint32_t s : sources) {
    std::fill(dist.begin(), dist.end(), UINT32_MAX);
    dist[s] = 0;
    frontier.assign(1, s);
    std::uint32_t d = 0;
    while (!frontier.empty()) {
      ++d;
      next.clear();
      for (std::uint32_t v : frontier) {
        for (const auto& nb : g.neighbors(v)) {
          if (dist[nb.node] == UINT32_MAX) {
            dist[nb.node] = d;
            total += d;
            ++pairs;
            next.push_back(nb.node);
          }
        }
      }
      frontier.swap(next);
    }
  }
  return static_cast<double>(total) / static_cast<double>(pairs);
}

}  // namespace orgnet
