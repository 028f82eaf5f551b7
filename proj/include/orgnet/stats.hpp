#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orgnet/graph.hpp"
#include "orgnet/ingest.hpp"

namespace orgnet {

struct OrgMonthRecord {
  std::string org_id;
  MonthKey month;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::uint64_t total_weight = 0;
  double q = 0.0;
  std::optional<double> ari_prev;
  std::optional<std::string> geography;

  double mean_weighted_degree() const {
    return node_count ? 2.0 * static_cast<double>(total_weight) /
                            static_cast<double>(node_count)
                      : 0.0;
  }
};

struct BootstrapResult {
  double observed_q = 0.0;
  int iterations = 0;
  double mean = 0.0;
  double sdev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const BootstrapResult&) const = default;
};

// Message-level network bootstrap: each iteration resamples sum(w_e) messages
// with replacement over edges (probability proportional to weight), rebuilds
// the graph from the resampled counts (edges drawn zero times vanish), runs
// seeded Leiden and records Q. Per-iteration sub-seeds derive from
// seed + iteration index, so results do not depend on execution order.
BootstrapResult bootstrap_modularity(const WeightedGraph& g,
                                     int iterations = 1000,
                                     std::uint64_t seed = 0,
                                     double resolution = 1.0);

// "mean ± 2*sdev" label used in reports; raw statistics always travel with
// the result itself.
std::string format_plus_minus(double mean, double sdev);

enum class WilcoxonMethod { exact, normal_approx };

struct WilcoxonResult {
  std::size_t n_effective = 0;  // zeros dropped
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_two_sided = 1.0;
  WilcoxonMethod method = WilcoxonMethod::exact;
};

// Paired signed-rank test on differences. Zeros are dropped, ties get
// average ranks; exact null enumeration for n_effective <= 25, otherwise a
// tie-corrected normal approximation with continuity correction.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs);

struct YoyDiffs {
  std::vector<std::pair<std::string, double>> diffs;  // org -> Q(y2) - Q(y1)
  std::size_t skipped_orgs = 0;  // missing either month
};

YoyDiffs yoy_paired_diffs(const std::vector<OrgMonthRecord>& records,
                          int month, int year1, int year2);

enum class SummaryMetric { q, ari_prev, total_weight, mean_weighted_degree };

struct SummaryRow {
  MonthKey month;
  std::string group;  // empty when ungrouped
  double mean = 0.0;
  double stderr_of_mean = 0.0;  // sample sdev / sqrt(count)
  std::size_t count = 0;
};

// Per-month (mean, stderr, count) series, optionally grouped by geography.
// Months (or groups) with no contributing records are simply absent.
std::vector<SummaryRow> timeseries_summary(
    const std::vector<OrgMonthRecord>& records, bool group_by_geography,
    SummaryMetric metric);

}  // namespace orgnet
