#include "orgnet/community.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "orgnet/rng.hpp"

namespace orgnet {

Partition Partition::from_labels(const std::vector<std::string>& ids,
                                 const std::vector<int>& labels) {
  if (ids.size() != labels.size())
    throw std::invalid_argument("ids/labels size mismatch");
  Partition p;
  std::map<int, int> remap;  // raw label -> normalized, by id order
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] =
        remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    (void)inserted;
    p.assignment.emplace(ids[i], it->second);
  }
  p.community_count = static_cast<int>(remap.size());
  return p;
}

std::vector<std::vector<std::string>> Partition::communities() const {
  std::vector<std::vector<std::string>> out(community_count);
  for (const auto& [id, c] : assignment) out[c].push_back(id);
  return out;
}

namespace {

// Working graph for the optimizer. `self` holds the diagonal A_vv weight that
// aggregation introduces; deg[v] = self[v] + sum of incident edge weights,
// total = sum deg (the L in the modularity formula).
struct LocalGraph {
  std::size_t n = 0;
  std::vector<std::size_t> off;
  std::vector<std::uint32_t> adj;
  std::vector<double> w;
  std::vector<double> self;
  std::vector<double> deg;
  double total = 0.0;
};

LocalGraph to_local(const WeightedGraph& g) {
  LocalGraph lg;
  lg.n = g.node_count();
  lg.off.assign(lg.n + 1, 0);
  for (std::size_t v = 0; v < lg.n; ++v)
    lg.off[v + 1] = lg.off[v] + g.neighbors(v).size();
  lg.adj.resize(lg.off[lg.n]);
  lg.w.resize(lg.off[lg.n]);
  std::size_t k = 0;
  lg.self.assign(lg.n, 0.0);
  lg.deg.assign(lg.n, 0.0);
  for (std::size_t v = 0; v < lg.n; ++v) {
    double d = 0.0;
    for (const auto& nb : g.neighbors(v)) {
      lg.adj[k] = nb.node;
      lg.w[k] = static_cast<double>(nb.weight);
      d += lg.w[k];
      ++k;
    }
    lg.deg[v] = d;
    lg.total += d;
  }
  return lg;
}

double local_modularity(const LocalGraph& g, const std::vector<int>& comm,
                        double resolution) {
  if (g.total <= 0.0) return 0.0;
  int k = 0;
  for (int c : comm) k = std::max(k, c + 1);
  std::vector<double> inside(k, 0.0), degree(k, 0.0);
  for (std::size_t v = 0; v < g.n; ++v) {
    inside[comm[v]] += g.self[v];
    degree[comm[v]] += g.deg[v];
    for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e)
      if (comm[g.adj[e]] == comm[v]) inside[comm[v]] += g.w[e];
  }
  double q = 0.0;
  for (int c = 0; c < k; ++c)
    q += inside[c] / g.total -
         resolution * (degree[c] / g.total) * (degree[c] / g.total);
  return q;
}

// Queue-based local moving. comm is modified in place; returns true if any
// node moved.
bool local_move(const LocalGraph& g, std::vector<int>& comm, double resolution,
                Rng& rng) {
  const std::size_t n = g.n;
  std::vector<double> comm_deg(n, 0.0);
  std::vector<std::size_t> comm_size(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    comm_deg[comm[v]] += g.deg[v];
    ++comm_size[comm[v]];
  }
  std::vector<int> free_labels;
  for (std::size_t c = 0; c < n; ++c)
    if (comm_size[c] == 0) free_labels.push_back(static_cast<int>(c));

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  std::vector<std::uint32_t> queue(order.begin(), order.end());
  std::vector<bool> queued(n, true);
  std::size_t head = 0;

  // scratch: weight from the current node to each touched community
  std::vector<double> k_to(n, 0.0);
  std::vector<int> touched;

  bool any_moved = false;
  while (head < queue.size()) {
    std::uint32_t v = queue[head++];
    queued[v] = false;
    const int cur = comm[v];

    touched.clear();
    for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
      int c = comm[g.adj[e]];
      if (k_to[c] == 0.0) touched.push_back(c);
      k_to[c] += g.w[e];
    }

    // candidate score: k_v->c - resolution * d_v * D_c' / L, where D_c'
    // excludes v itself
    const double dv = g.deg[v];
    const double stay =
        k_to[cur] - resolution * dv * (comm_deg[cur] - dv) / g.total;
    double best_val = stay;
    int best = cur;
    for (int c : touched) {
      if (c == cur) continue;
      double val = k_to[c] - resolution * dv * comm_deg[c] / g.total;
      if (val > best_val + 1e-13 * (1.0 + dv)) {
        best_val = val;
        best = c;
      }
    }
    // moving to an empty community scores 0; relevant only when staying is
    // strictly negative and v is not already alone
    if (comm_size[cur] > 1 && 0.0 > best_val + 1e-13 * (1.0 + dv) &&
        !free_labels.empty()) {
      best = free_labels.back();
      best_val = 0.0;
    }

    for (int c : touched) k_to[c] = 0.0;

    if (best == cur) continue;
    if (comm_size[best] == 0) free_labels.pop_back();
    comm_deg[cur] -= dv;
    comm_deg[best] += dv;
    if (--comm_size[cur] == 0) free_labels.push_back(cur);
    ++comm_size[best];
    comm[v] = best;
    any_moved = true;
    for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
      std::uint32_t u = g.adj[e];
      if (comm[u] != best && !queued[u]) {
        queued[u] = true;
        queue.push_back(u);
      }
    }
  }
  return any_moved;
}

// Leiden refinement: within each community of `comm`, grow a refined
// partition by merging singleton nodes into connected, well-connected
// refined communities with non-negative modularity gain, choosing the target
// randomly with probability proportional to exp(gain / theta). Guarantees
// refined communities are internally connected.
std::vector<int> refine(const LocalGraph& g, const std::vector<int>& comm,
                        double resolution, Rng& rng) {
  constexpr double kTheta = 0.01;  // greediness of the randomized merge
  const std::size_t n = g.n;
  std::vector<int> refined(n);
  std::iota(refined.begin(), refined.end(), 0);
  std::vector<double> ref_deg(g.deg);          // degree mass per refined comm
  std::vector<std::size_t> ref_size(n, 1);
  std::vector<double> comm_deg(n, 0.0);        // degree mass per comm label
  for (std::size_t v = 0; v < n; ++v) comm_deg[comm[v]] += g.deg[v];
  // weight from refined community to the rest of its parent community
  std::vector<double> ref_ext(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e)
      if (comm[g.adj[e]] == comm[v]) ref_ext[v] += g.w[e];

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  std::vector<double> k_to(n, 0.0);
  std::vector<int> touched;

  for (std::uint32_t v : order) {
    if (ref_size[refined[v]] > 1) continue;  // only lone nodes merge
    const int parent = comm[v];
    const double dv = g.deg[v];
    // well-connectedness of v within its parent community
    if (ref_ext[refined[v]] <
        resolution * dv * (comm_deg[parent] - dv) / g.total)
      continue;

    touched.clear();
    for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
      std::uint32_t u = g.adj[e];
      if (comm[u] != parent || u == v) continue;
      int r = refined[u];
      if (k_to[r] == 0.0) touched.push_back(r);
      k_to[r] += g.w[e];
    }

    // collect admissible targets with their gains
    std::vector<std::pair<int, double>> targets;
    double max_gain = 0.0;
    for (int r : touched) {
      if (r == refined[v]) continue;
      // target must itself be well-connected within the parent community
      if (ref_ext[r] < resolution * ref_deg[r] *
                           (comm_deg[parent] - ref_deg[r]) / g.total)
        continue;
      double gain = k_to[r] - resolution * dv * ref_deg[r] / g.total;
      if (gain < -1e-13 * (1.0 + dv)) continue;
      if (targets.empty() || gain > max_gain) max_gain = gain;
      targets.emplace_back(r, gain);
    }
    int best = -1;
    if (!targets.empty()) {
      // randomized, near-greedy selection over the gain scale of this node
      double total_weight = 0.0;
      std::vector<double> weights(targets.size());
      for (std::size_t i = 0; i < targets.size(); ++i) {
        weights[i] =
            std::exp((targets[i].second - max_gain) / (kTheta * dv));
        total_weight += weights[i];
      }
      double pick = rng.unit() * total_weight;
      std::size_t chosen = targets.size() - 1;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if (pick < weights[i]) {
          chosen = i;
          break;
        }
        pick -= weights[i];
      }
      best = targets[chosen].first;
    }
    if (best >= 0) {
      int from = refined[v];
      // edges from v into `best` flip from external to internal for the
      // merged community; all other v edges inside the parent stay external
      ref_ext[best] += ref_ext[from] - 2.0 * k_to[best];
      ref_deg[best] += dv;
      ref_size[best] += 1;
      ref_size[from] = 0;
      refined[v] = best;
    }
    for (int r : touched) k_to[r] = 0.0;
  }
  return refined;
}

// Normalizes labels to 0..k-1 by first appearance in node index order.
std::size_t normalize(std::vector<int>& labels) {
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  std::vector<int> remap(max_label + 1, -1);
  int next = 0;
  for (int& l : labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  return static_cast<std::size_t>(next);
}

// Aggregates on `refined` (labels must be normalized); each super-node
// inherits the phase-one community of its members.
std::pair<LocalGraph, std::vector<int>> aggregate(
    const LocalGraph& g, const std::vector<int>& refined, std::size_t k,
    const std::vector<int>& comm) {
  LocalGraph ag;
  ag.n = k;
  ag.self.assign(k, 0.0);
  ag.deg.assign(k, 0.0);
  ag.total = g.total;
  std::vector<int> init(k, 0);
  for (std::size_t v = 0; v < g.n; ++v) {
    ag.self[refined[v]] += g.self[v];
    ag.deg[refined[v]] += g.deg[v];
    init[refined[v]] = comm[v];
  }
  std::vector<std::unordered_map<std::uint32_t, double>> nbr(k);
  for (std::size_t v = 0; v < g.n; ++v) {
    int rv = refined[v];
    for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
      int ru = refined[g.adj[e]];
      if (ru == rv)
        // every intra pair is visited from both endpoints, which matches the
        // ordered-pair diagonal convention for self weights
        ag.self[rv] += g.w[e];
      else
        nbr[rv][static_cast<std::uint32_t>(ru)] += g.w[e];
    }
  }
  ag.off.assign(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) ag.off[c + 1] = ag.off[c] + nbr[c].size();
  ag.adj.resize(ag.off[k]);
  ag.w.resize(ag.off[k]);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t at = ag.off[c];
    std::vector<std::pair<std::uint32_t, double>> sorted(nbr[c].begin(),
                                                         nbr[c].end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [u, w] : sorted) {
      ag.adj[at] = u;
      ag.w[at] = w;
      ++at;
    }
  }
  return {std::move(ag), std::move(init)};
}

// One full move/refine/aggregate cascade starting from the given flat
// labels; returns improved flat labels.
std::vector<int> cascade(const LocalGraph& input, double resolution, Rng& rng,
                         std::vector<int> comm) {
  LocalGraph cur = input;
  const std::size_t n0 = input.n;
  std::vector<int> orig_to_super(n0);
  std::iota(orig_to_super.begin(), orig_to_super.end(), 0);
  normalize(comm);

  double prev_q = -2.0;
  for (;;) {
    local_move(cur, comm, resolution, rng);
    double q = local_modularity(cur, comm, resolution);
    if (q - prev_q <= 1e-10) break;
    prev_q = q;

    std::vector<int> refined = refine(cur, comm, resolution, rng);
    std::size_t k = normalize(refined);
    if (k == cur.n) {
      // refinement could not shrink anything; aggregate on the move-phase
      // partition instead so whole communities can still merge next level
      refined = comm;
      k = normalize(refined);
      if (k == cur.n) break;
    }

    auto [next, init] = aggregate(cur, refined, k, comm);
    normalize(init);  // induced labels live in the previous level's space
    for (std::size_t v = 0; v < n0; ++v)
      orig_to_super[v] = refined[orig_to_super[v]];
    cur = std::move(next);
    comm = std::move(init);
  }

  std::vector<int> labels(n0);
  for (std::size_t v = 0; v < n0; ++v) labels[v] = comm[orig_to_super[v]];
  normalize(labels);
  return labels;
}

std::vector<int> leiden_labels(const LocalGraph& input, double resolution,
                               Rng& rng) {
  // restarts explore different processing orders; each restart iterates the
  // cascade warm-started from its own flattened result until Q stalls
  const std::size_t n = input.n;
  const int attempts = n <= 64 ? 16 : n <= 1024 ? 8 : n <= 8192 ? 4 : 2;

  std::vector<int> best;
  double best_q = -2.0;
  for (int a = 0; a < attempts; ++a) {
    std::vector<int> labels(n);
    std::iota(labels.begin(), labels.end(), 0);
    double prev_q = -2.0;
    for (;;) {
      labels = cascade(input, resolution, rng, std::move(labels));
      double q = local_modularity(input, labels, resolution);
      if (q - prev_q <= 1e-10) {
        prev_q = q;
        break;
      }
      prev_q = q;
    }
    if (prev_q > best_q) {
      best_q = prev_q;
      best = std::move(labels);
    }
  }
  return best;
}

// Splits communities that ended up disconnected (rare, but the contract
// promises internally connected communities; splitting never lowers Q).
void split_disconnected(const LocalGraph& g, std::vector<int>& labels) {
  const std::size_t n = g.n;
  std::vector<int> out(n, -1);
  int next = 0;
  std::vector<std::uint32_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (out[s] >= 0) continue;
    int c = next++;
    out[s] = c;
    stack.push_back(static_cast<std::uint32_t>(s));
    while (!stack.empty()) {
      std::uint32_t v = stack.back();
      stack.pop_back();
      for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
        std::uint32_t u = g.adj[e];
        if (out[u] < 0 && labels[u] == labels[v]) {
          out[u] = c;
          stack.push_back(u);
        }
      }
    }
  }
  labels = std::move(out);
}

std::vector<int> index_labels(const WeightedGraph& g, const Partition& p) {
  if (p.assignment.size() != g.node_count())
    throw std::invalid_argument(
        "partition covers " + std::to_string(p.assignment.size()) +
        " nodes but graph has " + std::to_string(g.node_count()));
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

}  // namespace

double modularity(const WeightedGraph& g, const Partition& p,
                  double resolution) {
  std::vector<int> labels = index_labels(g, p);
  const double total = static_cast<double>(g.degree_sum());
  if (total <= 0.0) return 0.0;
  std::vector<double> inside(p.community_count, 0.0);
  std::vector<double> degree(p.community_count, 0.0);
  g.for_each_edge([&](std::uint32_t u, std::uint32_t v, std::uint64_t w) {
    if (labels[u] == labels[v]) inside[labels[u]] += 2.0 * static_cast<double>(w);
  });
  for (std::size_t v = 0; v < g.node_count(); ++v)
    degree[labels[v]] += static_cast<double>(g.weighted_degree(v));
  double q = 0.0;
  for (int c = 0; c < p.community_count; ++c)
    q += inside[c] / total - resolution * (degree[c] / total) * (degree[c] / total);
  return q;
}

Partition leiden(const WeightedGraph& g, double resolution,
                 std::uint64_t seed) {
  if (g.node_count() == 0) throw std::invalid_argument("leiden: empty graph");
  if (g.degree_sum() == 0) {
    // no edges: every partition scores 0; return all-in-one
    std::vector<int> labels(g.node_count(), 0);
    return Partition::from_labels(g.node_ids(), labels);
  }
  LocalGraph lg = to_local(g);
  Rng rng(mix_seed(seed, 0x6c656964656eULL));
  std::vector<int> labels = leiden_labels(lg, resolution, rng);
  split_disconnected(lg, labels);
  normalize(labels);
  return Partition::from_labels(g.node_ids(), labels);
}

std::vector<std::vector<std::string>> CommunityHierarchy::leaves() const {
  std::vector<std::vector<std::string>> out;
  std::vector<const Node*> stack{&root};
  // depth-first, children in order, so leaf order is deterministic
  std::vector<const Node*> ordered;
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (n->is_leaf()) {
      ordered.push_back(n);
      continue;
    }
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
      stack.push_back(&*it);
  }
  out.reserve(ordered.size());
  for (const Node* n : ordered) out.push_back(n->members);
  return out;
}

Partition CommunityHierarchy::leaf_partition() const {
  Partition p;
  auto ls = leaves();
  for (std::size_t c = 0; c < ls.size(); ++c)
    for (const auto& id : ls[c]) p.assignment.emplace(id, static_cast<int>(c));
  p.community_count = static_cast<int>(ls.size());
  return p;
}

namespace {

// Fallback split for communities Leiden refuses to break: halve by weighted
// degree rank (ties by id).
std::vector<std::vector<std::string>> bisect_by_degree(
    const WeightedGraph& g) {
  std::vector<std::size_t> idx(g.node_count());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    auto da = g.weighted_degree(a), db = g.weighted_degree(b);
    return da != db ? da > db : g.node_id(a) < g.node_id(b);
  });
  std::size_t half = (idx.size() + 1) / 2;
  std::vector<std::vector<std::string>> parts(2);
  for (std::size_t i = 0; i < idx.size(); ++i)
    parts[i < half ? 0 : 1].push_back(g.node_id(idx[i]));
  return parts;
}

CommunityHierarchy::Node build_hierarchy(const WeightedGraph& g,
                                         std::size_t n_max, double resolution,
                                         std::uint64_t seed, int level,
                                         int& max_depth) {
  CommunityHierarchy::Node node;
  max_depth = std::max(max_depth, level);

  Partition p = leiden(g, resolution, mix_seed(seed, level));
  std::vector<std::vector<std::string>> groups;
  if (p.community_count <= 1 && g.node_count() > n_max) {
    groups = bisect_by_degree(g);
  } else {
    groups = p.communities();
  }

  for (auto& members : groups) {
    if (members.size() <= n_max) {
      CommunityHierarchy::Node leaf;
      leaf.members = std::move(members);
      node.children.push_back(std::move(leaf));
    } else {
      std::unordered_set<std::string> keep(members.begin(), members.end());
      WeightedGraph sub = induced_subgraph(g, keep);
      node.children.push_back(build_hierarchy(
          sub, n_max, resolution, mix_seed(seed, hash_string(members.front())),
          level + 1, max_depth));
    }
  }
  return node;
}

}  // namespace

CommunityHierarchy hierarchical_leiden(const WeightedGraph& g,
                                       std::size_t n_max, std::uint64_t seed) {
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2");
  if (g.node_count() == 0) throw std::invalid_argument("empty graph");
  CommunityHierarchy h;
  int max_depth = 0;
  h.root = build_hierarchy(g, n_max, 1.0, seed, 1, max_depth);
  h.depth = max_depth;
  return h;
}

}  // namespace orgnet
