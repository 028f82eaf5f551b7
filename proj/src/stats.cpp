#include "orgnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

#include "orgnet/community.hpp"
#include "orgnet/rng.hpp"

namespace orgnet {

namespace {

// Walker alias table for sampling edges proportional to weight.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<std::uint64_t>& weights) {
    const std::size_t n = weights.size();
    prob_.resize(n);
    alias_.resize(n);
    long double total = 0.0L;
    for (auto w : weights) total += static_cast<long double>(w);
    std::vector<long double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = static_cast<long double>(weights[i]) * n / total;
      (scaled[i] < 1.0L ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      std::uint32_t s = small.back();
      small.pop_back();
      std::uint32_t l = large.back();
      large.pop_back();
      prob_[s] = static_cast<double>(scaled[s]);
      alias_[s] = l;
      scaled[l] -= 1.0L - scaled[s];
      (scaled[l] < 1.0L ? small : large).push_back(l);
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;
  }

  std::size_t draw(Rng& rng) const {
    std::size_t i = rng.index(prob_.size());
    return rng.unit() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace

BootstrapResult bootstrap_modularity(const WeightedGraph& g, int iterations,
                                     std::uint64_t seed, double resolution) {
  if (g.node_count() == 0)
    throw std::invalid_argument("bootstrap: empty graph");
  if (iterations < 1)
    throw std::invalid_argument("bootstrap: iterations must be >= 1");

  struct EdgeRef {
    std::uint32_t u, v;
  };
  std::vector<EdgeRef> edges;
  std::vector<std::uint64_t> weights;
  edges.reserve(g.edge_count());
  weights.reserve(g.edge_count());
  g.for_each_edge([&](std::uint32_t u, std::uint32_t v, std::uint64_t w) {
    edges.push_back({u, v});
    weights.push_back(w);
  });
  const std::uint64_t messages = g.total_weight();

  BootstrapResult result;
  result.seed = seed;
  result.iterations = iterations;
  result.observed_q =
      modularity(g, leiden(g, resolution, mix_seed(seed, 0)), resolution);

  if (edges.empty()) {
    result.mean = result.min = result.max = 0.0;
    return result;
  }
  AliasTable table(weights);

  std::vector<std::uint64_t> counts(edges.size());
  std::vector<double> qs;
  qs.reserve(iterations);
  for (int it = 0; it < iterations; ++it) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(it) + 1));
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t m = 0; m < messages; ++m) ++counts[table.draw(rng)];

    GraphBuilder b;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (counts[e] == 0) continue;
      b.add(g.node_id(edges[e].u), g.node_id(edges[e].v),
            static_cast<std::int64_t>(counts[e]));
    }
    WeightedGraph resampled = std::move(b).build();
    double q = 0.0;
    if (resampled.node_count() > 0) {
      Partition p = leiden(resampled, resolution,
                           mix_seed(seed, 0x10000000ULL + it));
      q = modularity(resampled, p, resolution);
    }
    qs.push_back(q);
  }

  double sum = std::accumulate(qs.begin(), qs.end(), 0.0);
  result.mean = sum / qs.size();
  double ss = 0.0;
  for (double q : qs) ss += (q - result.mean) * (q - result.mean);
  result.sdev = qs.size() > 1 ? std::sqrt(ss / (qs.size() - 1)) : 0.0;
  result.min = *std::min_element(qs.begin(), qs.end());
  result.max = *std::max_element(qs.begin(), qs.end());
  return result;
}

std::string format_plus_minus(double mean, double sdev) {
  double band = 2.0 * sdev;
  // band rounded to two significant digits
  char bandbuf[32];
  if (band == 0.0) {
    std::snprintf(bandbuf, sizeof bandbuf, "0");
  } else {
    int exponent = static_cast<int>(std::floor(std::log10(std::fabs(band))));
    int decimals = std::max(0, 1 - exponent);
    std::snprintf(bandbuf, sizeof bandbuf, "%.*f", decimals, band);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f ± %s", mean, bandbuf);
  return buf;
}

namespace {

// average ranks of |diffs| doubled, so they stay integral under ties
std::vector<std::uint64_t> doubled_ranks(const std::vector<double>& abs_diffs) {
  const std::size_t n = abs_diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return abs_diffs[a] < abs_diffs[b]; });
  std::vector<std::uint64_t> rank2(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && abs_diffs[order[j]] == abs_diffs[order[i]]) ++j;
    // ranks i+1 .. j averaged; doubled: (i+1 + j)
    std::uint64_t r2 = static_cast<std::uint64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = r2;
    i = j;
  }
  return rank2;
}

double exact_two_sided_p(const std::vector<std::uint64_t>& rank2,
                         std::uint64_t w2_plus) {
  // null distribution of the doubled statistic by subset-sum counting
  std::uint64_t max2 = std::accumulate(rank2.begin(), rank2.end(), 0ull);
  // subset counts fit exactly in doubles (n <= 25 so counts <= 2^25)
  std::vector<double> count(max2 + 1, 0.0);
  count[0] = 1.0;
  std::uint64_t reach = 0;
  for (std::uint64_t r : rank2) {
    reach += r;
    for (std::uint64_t s = reach; s >= r; --s) count[s] += count[s - r];
  }
  double total = std::ldexp(1.0, static_cast<int>(rank2.size()));
  double below = 0.0, above = 0.0;
  for (std::uint64_t s = 0; s <= max2; ++s) {
    if (s <= w2_plus) below += count[s];
    if (s >= w2_plus) above += count[s];
  }
  return std::min(1.0, 2.0 * std::min(below, above) / total);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs) {
  std::vector<double> nonzero;
  nonzero.reserve(diffs.size());
  for (double d : diffs)
    if (d != 0.0) nonzero.push_back(d);
  if (nonzero.empty())
    throw std::invalid_argument(
        "wilcoxon: all differences are zero, no test possible");

  const std::size_t n = nonzero.size();
  std::vector<double> abs_diffs(n);
  for (std::size_t i = 0; i < n; ++i) abs_diffs[i] = std::fabs(nonzero[i]);
  std::vector<std::uint64_t> rank2 = doubled_ranks(abs_diffs);

  std::uint64_t w2_plus = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (nonzero[i] > 0.0) w2_plus += rank2[i];

  WilcoxonResult res;
  res.n_effective = n;
  res.w_plus = static_cast<double>(w2_plus) / 2.0;
  res.w_minus = static_cast<double>(n) * (n + 1) / 2.0 - res.w_plus;

  if (n <= 25) {
    res.method = WilcoxonMethod::exact;
    res.p_two_sided = exact_two_sided_p(rank2, w2_plus);
    return res;
  }

  res.method = WilcoxonMethod::normal_approx;
  const double dn = static_cast<double>(n);
  const double mu = dn * (dn + 1.0) / 4.0;
  // tie correction: sum over tie groups of (t^3 - t) / 48
  double tie_term = 0.0;
  {
    std::vector<double> sorted(abs_diffs);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      double t = static_cast<double>(j - i);
      tie_term += (t * t * t - t) / 48.0;
      i = j;
    }
  }
  double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term;
  double w = res.w_plus;
  double cc = w > mu ? -0.5 : (w < mu ? 0.5 : 0.0);
  double z = var > 0.0 ? (w - mu + cc) / std::sqrt(var) : 0.0;
  res.p_two_sided = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
  return res;
}

YoyDiffs yoy_paired_diffs(const std::vector<OrgMonthRecord>& records,
                          int month, int year1, int year2) {
  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>>
      by_org;
  for (const auto& r : records) {
    if (r.month.month != month) continue;
    if (r.month.year == year1) by_org[r.org_id].first = r.q;
    if (r.month.year == year2) by_org[r.org_id].second = r.q;
  }
  YoyDiffs out;
  for (const auto& [org, qs] : by_org) {
    if (qs.first && qs.second)
      out.diffs.emplace_back(org, *qs.second - *qs.first);
    else
      ++out.skipped_orgs;
  }
  return out;
}

std::vector<SummaryRow> timeseries_summary(
    const std::vector<OrgMonthRecord>& records, bool group_by_geography,
    SummaryMetric metric) {
  std::map<std::pair<MonthKey, std::string>, std::vector<double>> buckets;
  for (const auto& r : records) {
    std::optional<double> value;
    switch (metric) {
      case SummaryMetric::q:
        value = r.q;
        break;
      case SummaryMetric::ari_prev:
        value = r.ari_prev;
        break;
      case SummaryMetric::total_weight:
        value = static_cast<double>(r.total_weight);
        break;
      case SummaryMetric::mean_weighted_degree:
        value = r.mean_weighted_degree();
        break;
    }
    if (!value) continue;
    std::string group;
    if (group_by_geography) {
      if (!r.geography) continue;
      group = *r.geography;
    }
    buckets[{r.month, group}].push_back(*value);
  }
  std::vector<SummaryRow> rows;
  rows.reserve(buckets.size());
  for (const auto& [key, values] : buckets) {
    SummaryRow row;
    row.month = key.first;
    row.group = key.second;
    row.count = values.size();
    double sum = std::accumulate(values.begin(), values.end(), 0.0);
    row.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      double sdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      row.stderr_of_mean = sdev / std::sqrt(static_cast<double>(values.size()));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace orgnet
