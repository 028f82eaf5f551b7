// Acceptance suite: one check per shipped criterion, each printing a single
// [PASS]/[FAIL] line. Exit code is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "orgnet/community.hpp"
#include "orgnet/generators.hpp"
#include "orgnet/graph.hpp"
#include "orgnet/ingest.hpp"
#include "orgnet/partition_metrics.hpp"
#include "orgnet/rng.hpp"
#include "orgnet/stats.hpp"

using namespace orgnet;
using clock_type = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// ---- shared fixtures -------------------------------------------------------

std::vector<std::string> numbered_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i)
    ids.push_back("n" + std::string(i < 10 ? "0" : "") + std::to_string(i));
  return ids;
}

std::pair<Partition, Partition> swap_scenario() {
  auto ids = numbered_ids(20);
  std::vector<int> before(20), after(20);
  for (int i = 0; i < 20; ++i) before[i] = i < 10 ? 0 : 1;
  after = before;
  after[8] = after[9] = 1;
  after[18] = after[19] = 0;
  return {Partition::from_labels(ids, before),
          Partition::from_labels(ids, after)};
}

WeightedGraph random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<std::string> ids;
  for (std::size_t v = 0; v < n; ++v) ids.push_back("n" + std::to_string(v));
  std::vector<WeightedPair> pairs;
  for (std::size_t u = 0; u + 1 < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.unit() < p)
        pairs.push_back(
            {ids[u], ids[v], static_cast<std::int64_t>(1 + rng.index(5))});
  if (pairs.empty()) pairs.push_back({ids[0], ids[1], 1});
  return build_graph(ids, pairs);
}

WeightedGraph disjoint_cliques(std::size_t k, std::int64_t w) {
  std::vector<WeightedPair> pairs;
  for (char block : {'a', 'b'})
    for (std::size_t i = 0; i + 1 < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        pairs.push_back({std::string(1, block) + std::to_string(i),
                         std::string(1, block) + std::to_string(j), w});
  return build_graph(pairs);
}

double brute_force_max_q(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<int> rgs(n, 0), maxv(n, 0);
  double best = -2.0;
  for (;;) {
    best = std::max(best,
                    modularity(g, Partition::from_labels(g.node_ids(), rgs)));
    std::size_t i = n;
    bool advanced = false;
    while (i-- > 1) {
      if (rgs[i] <= maxv[i - 1]) {
        ++rgs[i];
        maxv[i] = std::max(maxv[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
          rgs[j] = 0;
          maxv[j] = maxv[i];
        }
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return best;
}

double modularity_oracle(const WeightedGraph& g, const Partition& p) {
  const double L = static_cast<double>(g.degree_sum());
  const std::size_t n = g.node_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  g.for_each_edge([&](std::uint32_t u, std::uint32_t v, std::uint64_t w) {
    a[u][v] = a[v][u] = static_cast<double>(w);
  });
  double q = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (p.assignment.at(g.node_id(u)) != p.assignment.at(g.node_id(v)))
        continue;
      q += a[u][v] - static_cast<double>(g.weighted_degree(u)) *
                         static_cast<double>(g.weighted_degree(v)) / L;
    }
  return q / L;
}

double wilcoxon_enumeration_oracle(const std::vector<double>& diffs) {
  std::vector<double> nonzero;
  for (double d : diffs)
    if (d != 0.0) nonzero.push_back(d);
  const std::size_t n = nonzero.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(nonzero[a]) < std::fabs(nonzero[b]);
  });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n &&
           std::fabs(nonzero[order[j]]) == std::fabs(nonzero[order[i]]))
      ++j;
    double avg = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
    i = j;
  }
  double w_obs = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (nonzero[k] > 0.0) w_obs += rank[k];
  std::size_t below = 0, above = 0;
  const std::size_t patterns = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double w = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) w += rank[k];
    if (w <= w_obs + 1e-9) ++below;
    if (w >= w_obs - 1e-9) ++above;
  }
  return std::min(
      1.0, 2.0 * std::min(below, above) / static_cast<double>(patterns));
}

// 30-leaf, 5-root hierarchical network on exactly 5000 nodes, heavy-tailed
// inside leaves
WeightedGraph hierarchical_fixture(std::uint64_t seed) {
  const int leaves = 30, per_root = 6;
  BahsbmModel model;
  model.n_max = 250;
  for (int l = 0; l < leaves; ++l) {
    std::size_t n = l < 20 ? 167 : 166;  // 20*167 + 10*166 = 5000
    std::uint64_t budget = 6 + 3 * (n - 4);
    model.leaves.push_back({l, n, budget, 3});
  }
  for (int a = 0; a < leaves; ++a)
    for (int b = a + 1; b < leaves; ++b)
      model.inter.push_back(
          {a, b,
           (a / per_root == b / per_root) ? std::uint64_t{40}
                                          : std::uint64_t{4}});
  return sample_bahsbm(model, seed);
}

// ---- criteria --------------------------------------------------------------

// swap-scenario ARI is exactly 2920/9000, computed in under a millisecond
Check criterion_1() {
  Check c;
  auto [p1, p2] = swap_scenario();
  // warm-up, then time the measured evaluation
  double ari = adjusted_rand_index(contingency_table(p1, p2));
  auto t0 = clock_type::now();
  ContingencyTable table = contingency_table(p1, p2);
  ari = adjusted_rand_index(table);
  double elapsed = seconds_since(t0);
  c.require(std::fabs(ari - 2920.0 / 9000.0) <= 1e-12,
            "ARI != 2920/9000 (got " + std::to_string(ari) + ")");
  c.require(std::round(ari * 1000.0) == 324.0, "does not round to 0.324");
  c.require(elapsed < 1e-3,
            "took " + std::to_string(elapsed * 1e3) + " ms (limit 1)");
  c.detail << "ari=" << ari << " in " << elapsed * 1e6 << " us";
  return c;
}

// mean Leiden Q over 500 SBM seeds lands in the published windows
Check criterion_2() {
  Check c;
  auto t0 = clock_type::now();
  const int seeds = 500;
  auto mean_q = [&](double between) {
    SbmSpec spec{{10, 10}, {{0.50, between}, {between, 0.50}}};
    double sum = 0.0;
    for (int s = 0; s < seeds; ++s) {
      WeightedGraph g = sample_sbm(spec, mix_seed(2024, s));
      sum += modularity(g, leiden(g, 1.0, mix_seed(4202, s)));
    }
    return sum / seeds;
  };
  double q_low = mean_q(0.05);
  double q_high = mean_q(0.15);
  double elapsed = seconds_since(t0);
  c.require(q_low >= 0.37 && q_low <= 0.45,
            "between=0.05 mean outside [0.37,0.45]");
  c.require(q_high >= 0.26 && q_high <= 0.34,
            "between=0.15 mean outside [0.26,0.34]");
  c.require(q_low > q_high, "0.05 variant does not exceed 0.15 variant");
  c.require(elapsed < 30.0, "exceeded 30 s");
  c.detail << "mean(0.05)=" << q_low << " mean(0.15)=" << q_high << " in "
           << elapsed << " s";
  return c;
}

// all-in-one Q is zero, split cliques score exactly one half
Check criterion_3() {
  Check c;
  Rng rng(303);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    WeightedGraph g = random_graph(rng, 4 + rng.index(12), 0.2 + 0.6 * rng.unit());
    Partition all = Partition::from_labels(
        g.node_ids(), std::vector<int>(g.node_count(), 0));
    worst = std::max(worst, std::fabs(modularity(g, all)));
  }
  c.require(worst <= 1e-12, "all-in-one |Q| up to " + std::to_string(worst));
  for (std::size_t k : {3u, 4u, 6u, 9u}) {
    WeightedGraph g = disjoint_cliques(k, 1);
    std::vector<int> labels;
    for (const auto& id : g.node_ids()) labels.push_back(id[0] == 'a' ? 0 : 1);
    double q = modularity(g, Partition::from_labels(g.node_ids(), labels));
    c.require(q == 0.5, "clique pair k=" + std::to_string(k) + " Q != 0.5");
  }
  c.detail << "max |Q_all-in-one| = " << worst;
  return c;
}

// Leiden reaches 95% of the exhaustive optimum; evaluation matches the
// double-loop oracle
Check criterion_4() {
  Check c;
  Rng rng(404);
  double worst_ratio = 1.0, worst_eval = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 3 + rng.index(6);
    WeightedGraph g = random_graph(rng, n, 0.25 + 0.6 * rng.unit());
    double exact = brute_force_max_q(g);
    Partition lp = leiden(g, 1.0, mix_seed(44, t));
    double lq = modularity(g, lp);
    if (lq + 1e-12 < 0.95 * exact) {
      c.require(false, "graph " + std::to_string(t) + ": leiden " +
                           std::to_string(lq) + " < 0.95 * " +
                           std::to_string(exact));
    }
    if (exact > 1e-9) worst_ratio = std::min(worst_ratio, lq / exact);
    worst_eval =
        std::max(worst_eval, std::fabs(lq - modularity_oracle(g, lp)));
  }
  c.require(worst_eval <= 1e-12,
            "evaluation drifts from oracle by " + std::to_string(worst_eval));
  c.detail << "worst leiden/exact ratio " << worst_ratio << ", max eval gap "
           << worst_eval;
  return c;
}

// exact Wilcoxon p equals full enumeration; the normal path tracks it
Check criterion_5() {
  Check c;
  double worst_exact = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    const std::size_t patterns = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      std::vector<double> diffs;
      for (std::size_t k = 0; k < n; ++k) {
        double mag = static_cast<double>(k + 1);
        diffs.push_back(mask & (std::size_t{1} << k) ? mag : -mag);
      }
      double got = wilcoxon_signed_rank(diffs).p_two_sided;
      double want = wilcoxon_enumeration_oracle(diffs);
      worst_exact = std::max(worst_exact, std::fabs(got - want));
    }
  }
  c.require(worst_exact <= 1e-12,
            "exact vs enumeration gap " + std::to_string(worst_exact));

  Rng rng(505);
  double worst_approx = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 20 + rng.index(6);
    std::vector<double> diffs;
    for (std::size_t i = 0; i < n; ++i)
      diffs.push_back((rng.unit() - 0.45) * 2.0);
    WilcoxonResult exact = wilcoxon_signed_rank(diffs);
    double dn = static_cast<double>(exact.n_effective);
    double mu = dn * (dn + 1.0) / 4.0;
    double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0;
    double w = exact.w_plus;
    double cc = w > mu ? -0.5 : (w < mu ? 0.5 : 0.0);
    double z = (w - mu + cc) / std::sqrt(var);
    double p_norm = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
    worst_approx = std::max(worst_approx,
                            std::fabs(p_norm - exact.p_two_sided));
  }
  c.require(worst_approx <= 0.01,
            "normal vs exact gap " + std::to_string(worst_approx));
  c.detail << "max exact gap " << worst_exact << ", max approx gap "
           << worst_approx;
  return c;
}

// a planted month-13 shock produces the rising-Q, dipping-ARI signature
Check criterion_6() {
  Check c;
  auto t0 = clock_type::now();
  const int orgs = 50, months = 24, shock = 13;  // 1-based month index
  const int blocks = 4, block_size = 50, n = blocks * block_size;

  std::vector<double> dq_at_shock;
  double ari_before = 0.0, ari_dip = 0.0, ari_after = 0.0;
  for (int org = 0; org < orgs; ++org) {
    // planted memberships; 10% churn at the shock month, permanent after
    std::vector<int> membership(n);
    for (int v = 0; v < n; ++v) membership[v] = v / block_size;
    std::vector<int> churned(membership);
    Rng churn_rng(mix_seed(606, org));
    for (int moved = 0; moved < n / 10; ++moved) {
      int v = static_cast<int>(churn_rng.index(n));
      churned[v] = static_cast<int>(churn_rng.index(blocks));
    }

    auto sample_month = [&](int month) {
      bool post = month >= shock;
      const std::vector<int>& labels = post ? churned : membership;
      double p_out = post ? 0.025 : 0.05;
      std::vector<std::string> ids;
      for (int v = 0; v < n; ++v)
        ids.push_back("m" + std::to_string(v / 100) +
                      std::to_string((v / 10) % 10) + std::to_string(v % 10));
      std::vector<WeightedPair> pairs;
      Rng rng(mix_seed(707, org * 100 + month));
      for (int u = 0; u + 1 < n; ++u)
        for (int v = u + 1; v < n; ++v) {
          double p = labels[u] == labels[v] ? 0.4 : p_out;
          if (rng.unit() < p) pairs.push_back({ids[u], ids[v], 1});
        }
      return build_graph(ids, pairs);
    };

    std::vector<double> qs(months + 1);
    std::vector<Partition> parts(months + 1);
    for (int month = 1; month <= months; ++month) {
      WeightedGraph g = largest_connected_component(sample_month(month));
      parts[month] = leiden(g, 1.0, mix_seed(808, org * 100 + month));
      qs[month] = modularity(g, parts[month]);
    }
    dq_at_shock.push_back(qs[shock] - qs[shock - 1]);
    ari_before += adjusted_rand_index(parts[shock - 2], parts[shock - 1]);
    ari_dip += adjusted_rand_index(parts[shock - 1], parts[shock]);
    ari_after += adjusted_rand_index(parts[shock], parts[shock + 1]);
  }
  ari_before /= orgs;
  ari_dip /= orgs;
  ari_after /= orgs;

  WilcoxonResult w = wilcoxon_signed_rank(dq_at_shock);
  double mean_dq =
      std::accumulate(dq_at_shock.begin(), dq_at_shock.end(), 0.0) / orgs;
  c.require(mean_dq > 0.0, "mean dQ at shock not positive");
  c.require(w.p_two_sided < 0.01,
            "Wilcoxon p " + std::to_string(w.p_two_sided) + " >= 0.01");
  c.require(ari_dip < ari_before, "no ARI dip at the shock");
  c.require(ari_after > ari_dip, "no ARI recovery after the shock");
  c.detail << "mean dQ=" << mean_dq << " p=" << w.p_two_sided << " ARI "
           << ari_before << " -> " << ari_dip << " -> " << ari_after << " in "
           << seconds_since(t0) << " s";
  return c;
}

// BA-HSBM refit of a 5000-node 30-leaf network reproduces it
Check criterion_7() {
  Check c;
  auto t0 = clock_type::now();
  WeightedGraph real = hierarchical_fixture(909);
  Partition root = leiden(real, 1.0, 1001);
  double q_real = modularity(real, root);

  BahsbmModel model = fit_bahsbm(real, 250, 1001);
  AposterioriSbmFit root_fit = fit_aposteriori_sbm(real, root);

  const int seeds = 20;
  int ks_wins = 0;
  double worst_edge_err = 0.0, worst_dq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    WeightedGraph sample = sample_bahsbm(model, mix_seed(1100, s));
    c.require(sample.node_count() == real.node_count(),
              "seed " + std::to_string(s) + ": node count drifted");
    double edge_err =
        std::fabs(static_cast<double>(sample.edge_count()) -
                  static_cast<double>(real.edge_count())) /
        static_cast<double>(real.edge_count());
    worst_edge_err = std::max(worst_edge_err, edge_err);
    double q_gen =
        modularity(sample, leiden(sample, 1.0, mix_seed(1200, s)));
    worst_dq = std::max(worst_dq, std::fabs(q_gen - q_real));

    WeightedGraph er = sample_root_sbm(root_fit, IntraModel::er, mix_seed(1300, s));
    WeightedGraph ba = sample_root_sbm(root_fit, IntraModel::ba, mix_seed(1300, s));
    if (degree_ks_distance(real, ba) < degree_ks_distance(real, er)) ++ks_wins;
  }
  double elapsed = seconds_since(t0);
  c.require(worst_edge_err <= 0.02,
            "edge error " + std::to_string(worst_edge_err) + " > 2%");
  c.require(worst_dq <= 0.05, "|dQ| " + std::to_string(worst_dq) + " > 0.05");
  c.require(ks_wins >= 18, "BA-mode KS closer in only " +
                               std::to_string(ks_wins) + "/20 seeds");
  c.require(elapsed < 300.0, "exceeded 5 minutes");
  c.detail << model.leaves.size() << " leaves, worst edge err "
           << worst_edge_err << ", worst |dQ| " << worst_dq << ", KS wins "
           << ks_wins << "/20, " << elapsed << " s";
  return c;
}

// recipient cap, self-loop removal, LCC reduction, strict eligibility
Check criterion_8() {
  Check c;
  IngestConfig config;  // defaults: max_recipients 4, min_nodes 2000

  auto receipt = [](const std::string& org, const std::string& ts,
                    const std::string& sender,
                    std::vector<std::string> recipients) {
    Receipt r;
    r.org_id = org;
    r.epoch_seconds = *parse_iso8601(ts);
    r.sender = sender;
    r.recipients = std::move(recipients);
    return r;
  };

  {
    // cap and self-loop rules feed the aggregation
    std::vector<Receipt> receipts = {
        receipt("acme", "2020-01-05T00:00:00Z", "s",
                {"a", "b", "c", "d", "e"}),               // 5 recipients: drop
        receipt("acme", "2020-01-05T01:00:00Z", "s", {"s"}),  // self only
        receipt("acme", "2020-01-05T02:00:00Z", "s", {"a", "s"}),
        receipt("acme", "2020-01-05T03:00:00Z", "a", {"s"})};
    MonthlyNetworks nets = monthly_networks_before_lcc(receipts, config);
    const WeightedGraph& g = nets.begin()->second;
    c.require(g.node_count() == 2, "cap/self rules: wrong node count");
    c.require(g.total_weight() == 2, "cap/self rules: wrong weight");
  }
  {
    // LCC: triangle plus detached pair collapses to the triangle
    std::vector<Receipt> receipts = {
        receipt("acme", "2020-01-05T00:00:00Z", "a", {"b", "c"}),
        receipt("acme", "2020-01-05T01:00:00Z", "b", {"c"}),
        receipt("acme", "2020-01-05T02:00:00Z", "x", {"y"})};
    MonthlyNetworks nets = receipts_to_monthly_networks(receipts, config);
    const WeightedGraph& g = nets.begin()->second;
    c.require(g.node_count() == 3, "LCC not extracted");
    c.require(!g.index_of("x").has_value(), "detached pair survived");
  }
  {
    // strict |V| > 2000: a 2001-node star stays, a 2000-node star goes
    std::vector<Receipt> receipts;
    auto star = [&](const std::string& org, const std::string& ts, int nodes) {
      for (int i = 1; i < nodes; ++i)
        receipts.push_back(
            receipt(org, ts, "hub", {"node" + std::to_string(i)}));
    };
    star("keeps", "2020-01-15T00:00:00Z", 2001);
    star("keeps", "2020-02-15T00:00:00Z", 2001);
    star("drops", "2020-01-15T00:00:00Z", 2001);
    star("drops", "2020-02-15T00:00:00Z", 2000);
    EligibilityReport report = filter_eligible_orgs(
        receipts_to_monthly_networks(receipts, config), config);
    std::set<std::string> kept;
    for (const auto& [key, g] : report.networks) kept.insert(key.org_id);
    c.require(kept == std::set<std::string>{"keeps"},
              "strict eligibility threshold misapplied");
    c.require(report.excluded.size() == 1 &&
                  report.excluded[0].org_id == "drops",
              "exclusion not logged");
  }
  c.detail << "cap, self-loop, LCC, strict >2000 all verified";
  return c;
}

// bootstrap determinism and the heavy two-clique sanity window
Check criterion_9() {
  Check c;
  WeightedGraph g = disjoint_cliques(20, 50);
  BootstrapResult a = bootstrap_modularity(g, 1000, 42);
  BootstrapResult b = bootstrap_modularity(g, 1000, 42);
  c.require(a == b, "identical seeds disagree");
  c.require(std::fabs(a.mean - 0.5) <= 0.02,
            "mean " + std::to_string(a.mean) + " not within 0.02 of 0.5");
  c.require(a.sdev < 0.02, "sdev " + std::to_string(a.sdev) + " >= 0.02");
  c.require(a.min <= a.mean && a.mean <= a.max, "min/mean/max out of order");
  c.detail << "mean=" << a.mean << " sdev=" << a.sdev << " range=[" << a.min
           << "," << a.max << "]";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    const char* label;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"c1", "toy ARI 2920/9000 under 1 ms", criterion_1},
      {"c2", "SBM mean Leiden Q windows", criterion_2},
      {"c3", "modularity identities", criterion_3},
      {"c4", "brute-force optimality, n <= 8", criterion_4},
      {"c5", "Wilcoxon exact + normal approximation", criterion_5},
      {"c6", "dynamic-silos shock signature", criterion_6},
      {"c7", "BA-HSBM fidelity at 5000 nodes", criterion_7},
      {"c8", "ingestion rules", criterion_8},
      {"c9", "bootstrap determinism and sanity", criterion_9},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (argc > 1 && std::strcmp(argv[1], criterion.name) != 0) continue;
    Check result = criterion.run();
    std::printf("[%s] %s: %s (%s)\n", result.ok ? "PASS" : "FAIL",
                criterion.name, criterion.label, result.detail.str().c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
