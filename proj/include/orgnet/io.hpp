#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "orgnet/community.hpp"
#include "orgnet/generators.hpp"
#include "orgnet/graph.hpp"
#include "orgnet/ingest.hpp"
#include "orgnet/stats.hpp"

namespace orgnet::io {

// shortest round-trip decimal form, deterministic across runs
std::string format_double(double v);

// edge-list CSV, header "u,v,weight", one row per undirected edge in
// canonical order
void write_edge_csv(std::ostream& out, const WeightedGraph& g);
void write_edge_csv(const std::filesystem::path& path, const WeightedGraph& g);
WeightedGraph read_edge_csv(std::istream& in);
WeightedGraph read_edge_csv(const std::filesystem::path& path);

struct GraphMeta {
  std::string org_id;
  std::string month;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::uint64_t total_weight = 0;

  bool operator==(const GraphMeta&) const = default;
};
void write_graph_meta(const std::filesystem::path& path, const GraphMeta& meta);
GraphMeta read_graph_meta(const std::filesystem::path& path);

// partition CSV, header "node,community", sorted by node id
void write_partition_csv(std::ostream& out, const Partition& p);
void write_partition_csv(const std::filesystem::path& path, const Partition& p);
Partition read_partition_csv(std::istream& in);

// records CSV, header "org,month,n,edges,weight,Q,ari_prev"
void write_records_csv(std::ostream& out,
                       const std::vector<OrgMonthRecord>& records);
std::vector<OrgMonthRecord> read_records_csv(std::istream& in);
std::vector<OrgMonthRecord> read_records_csv(const std::filesystem::path& path);

// ARI series CSV, header "org_id,month,ari_vs_prev,common_nodes"
struct AriSeriesRow {
  std::string org_id;
  MonthKey month;
  std::optional<double> ari;
  std::size_t common_nodes = 0;
};
void write_ari_series_csv(std::ostream& out,
                          const std::vector<AriSeriesRow>& rows);

// summary CSV, header "month,group,metric,mean,stderr,count"
void write_summary_csv(std::ostream& out, const std::string& metric_name,
                       const std::vector<SummaryRow>& rows);

// diff histogram CSV, header "bin_left,bin_right,count,pair_label"
struct HistogramBin {
  double left;
  double right;
  std::size_t count;
};
std::vector<HistogramBin> histogram_bins(const std::vector<double>& values,
                                         std::size_t bin_count);
void write_diff_histogram_csv(std::ostream& out,
                              const std::vector<HistogramBin>& bins,
                              const std::string& pair_label);

std::string wilcoxon_report_json(const WilcoxonResult& r);
std::string bootstrap_result_json(const BootstrapResult& r);

std::string bahsbm_model_json(const BahsbmModel& model);
BahsbmModel parse_bahsbm_model_json(const std::string& text);

std::string comparison_report_json(const ComparisonReport& r);
ComparisonReport parse_comparison_report_json(const std::string& text);

std::string hierarchy_json(const CommunityHierarchy& h);

// FNV-1a 64 over file bytes, hex encoded
std::string file_digest(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // flag -> value
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> digest
  std::vector<std::string> outputs;
  double wall_time_seconds = 0.0;
};
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace orgnet::io
