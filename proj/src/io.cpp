#include "orgnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace orgnet::io {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  return in;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf, ptr);
}

void write_edge_csv(std::ostream& out, const WeightedGraph& g) {
  out << "u,v,weight\n";
  g.for_each_edge([&](std::uint32_t u, std::uint32_t v, std::uint64_t w) {
    out << g.node_id(u) << ',' << g.node_id(v) << ',' << w << '\n';
  });
}

void write_edge_csv(const std::filesystem::path& path, const WeightedGraph& g) {
  auto out = open_out(path);
  write_edge_csv(out, g);
}

WeightedGraph read_edge_csv(std::istream& in) {
  GraphBuilder b;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "u,v,weight") continue;
    auto fields = split_csv(line);
    if (fields.size() != 3)
      throw std::runtime_error("edge csv line " + std::to_string(lineno) +
                               ": expected 3 columns");
    b.add(fields[0], fields[1], static_cast<std::int64_t>(parse_u64(fields[2])));
  }
  return std::move(b).build();
}

WeightedGraph read_edge_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_edge_csv(in);
}

void write_graph_meta(const std::filesystem::path& path, const GraphMeta& meta) {
  nlohmann::json j{{"org_id", meta.org_id},
                   {"month", meta.month},
                   {"node_count", meta.node_count},
                   {"edge_count", meta.edge_count},
                   {"total_weight", meta.total_weight}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

GraphMeta read_graph_meta(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j = nlohmann::json::parse(in);
  GraphMeta m;
  m.org_id = j.at("org_id").get<std::string>();
  m.month = j.at("month").get<std::string>();
  m.node_count = j.at("node_count").get<std::size_t>();
  m.edge_count = j.at("edge_count").get<std::size_t>();
  m.total_weight = j.at("total_weight").get<std::uint64_t>();
  return m;
}

void write_partition_csv(std::ostream& out, const Partition& p) {
  out << "node,community\n";
  for (const auto& [id, c] : p.assignment) out << id << ',' << c << '\n';
}

void write_partition_csv(const std::filesystem::path& path, const Partition& p) {
  auto out = open_out(path);
  write_partition_csv(out, p);
}

Partition read_partition_csv(std::istream& in) {
  Partition p;
  std::string line;
  std::size_t lineno = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "node,community") continue;
    auto fields = split_csv(line);
    if (fields.size() != 2)
      throw std::runtime_error("partition csv line " + std::to_string(lineno));
    int label = static_cast<int>(parse_u64(fields[1]));
    p.assignment[fields[0]] = label;
    max_label = std::max(max_label, label);
  }
  p.community_count = max_label + 1;
  return p;
}

void write_records_csv(std::ostream& out,
                       const std::vector<OrgMonthRecord>& records) {
  out << "org,month,n,edges,weight,Q,ari_prev\n";
  for (const auto& r : records) {
    out << r.org_id << ',' << r.month.str() << ',' << r.node_count << ','
        << r.edge_count << ',' << r.total_weight << ',' << format_double(r.q)
        << ',';
    if (r.ari_prev) out << format_double(*r.ari_prev);
    out << '\n';
  }
}

std::vector<OrgMonthRecord> read_records_csv(std::istream& in) {
  std::vector<OrgMonthRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("org,", 0) == 0) continue;
    auto fields = split_csv(line);
    if (fields.size() != 7)
      throw std::runtime_error("records csv line " + std::to_string(lineno) +
                               ": expected 7 columns");
    OrgMonthRecord r;
    r.org_id = fields[0];
    auto mk = MonthKey::parse(fields[1]);
    if (!mk)
      throw std::runtime_error("records csv line " + std::to_string(lineno) +
                               ": bad month '" + fields[1] + "'");
    r.month = *mk;
    r.node_count = parse_u64(fields[2]);
    r.edge_count = parse_u64(fields[3]);
    r.total_weight = parse_u64(fields[4]);
    r.q = parse_double(fields[5]);
    if (!fields[6].empty()) r.ari_prev = parse_double(fields[6]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<OrgMonthRecord> read_records_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_records_csv(in);
}

void write_ari_series_csv(std::ostream& out,
                          const std::vector<AriSeriesRow>& rows) {
  out << "org_id,month,ari_vs_prev,common_nodes\n";
  for (const auto& r : rows) {
    out << r.org_id << ',' << r.month.str() << ',';
    if (r.ari) out << format_double(*r.ari);
    out << ',' << r.common_nodes << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::string& metric_name,
                       const std::vector<SummaryRow>& rows) {
  out << "month,group,metric,mean,stderr,count\n";
  for (const auto& r : rows) {
    out << r.month.str() << ',' << r.group << ',' << metric_name << ','
        << format_double(r.mean) << ',' << format_double(r.stderr_of_mean)
        << ',' << r.count << '\n';
  }
}

std::vector<HistogramBin> histogram_bins(const std::vector<double>& values,
                                         std::size_t bin_count) {
  std::vector<HistogramBin> bins;
  if (values.empty() || bin_count == 0) return bins;
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    bins.push_back({lo, hi, values.size()});
    return bins;
  }
  double width = (hi - lo) / static_cast<double>(bin_count);
  bins.resize(bin_count);
  for (std::size_t b = 0; b < bin_count; ++b)
    bins[b] = {lo + width * static_cast<double>(b),
               lo + width * static_cast<double>(b + 1), 0};
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    if (b >= bin_count) b = bin_count - 1;  // hi lands in the last bin
    ++bins[b].count;
  }
  return bins;
}

void write_diff_histogram_csv(std::ostream& out,
                              const std::vector<HistogramBin>& bins,
                              const std::string& pair_label) {
  out << "bin_left,bin_right,count,pair_label\n";
  for (const auto& b : bins)
    out << format_double(b.left) << ',' << format_double(b.right) << ','
        << b.count << ',' << pair_label << '\n';
}

std::string wilcoxon_report_json(const WilcoxonResult& r) {
  nlohmann::json j{
      {"n_effective", r.n_effective},
      {"w_plus", r.w_plus},
      {"w_minus", r.w_minus},
      {"p_two_sided", r.p_two_sided},
      {"method",
       r.method == WilcoxonMethod::exact ? "exact" : "normal-approx"}};
  return j.dump(2);
}

std::string bootstrap_result_json(const BootstrapResult& r) {
  nlohmann::json j{{"observed_q", r.observed_q}, {"iterations", r.iterations},
                   {"mean", r.mean},             {"sdev", r.sdev},
                   {"min", r.min},               {"max", r.max},
                   {"seed", r.seed},
                   {"label", format_plus_minus(r.mean, r.sdev)}};
  return j.dump(2);
}

namespace {

nlohmann::json tree_to_json(const BahsbmModel::TreeNode& node) {
  if (node.leaf_id >= 0) return node.leaf_id;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : node.children) arr.push_back(tree_to_json(c));
  return arr;
}

BahsbmModel::TreeNode tree_from_json(const nlohmann::json& j) {
  BahsbmModel::TreeNode node;
  if (j.is_number_integer()) {
    node.leaf_id = j.get<int>();
    return node;
  }
  for (const auto& c : j) node.children.push_back(tree_from_json(c));
  return node;
}

nlohmann::json hierarchy_node_json(const CommunityHierarchy::Node& node) {
  if (node.is_leaf()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& id : node.members) arr.push_back(id);
    return arr;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : node.children) arr.push_back(hierarchy_node_json(c));
  return arr;
}

}  // namespace

std::string bahsbm_model_json(const BahsbmModel& model) {
  nlohmann::json leaves = nlohmann::json::array();
  for (const auto& l : model.leaves)
    leaves.push_back({{"id", l.id},
                      {"vertices", l.vertices},
                      {"edge_budget", l.edge_budget},
                      {"m", l.m}});
  nlohmann::json inter = nlohmann::json::array();
  for (const auto& i : model.inter)
    inter.push_back(
        {{"leaf_a", i.leaf_a}, {"leaf_b", i.leaf_b}, {"count", i.count}});
  nlohmann::json j{{"n_max", model.n_max},
                   {"leaves", leaves},
                   {"inter", inter},
                   {"hierarchy", tree_to_json(model.hierarchy)}};
  return j.dump(2);
}

BahsbmModel parse_bahsbm_model_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  BahsbmModel model;
  model.n_max = j.at("n_max").get<std::size_t>();
  for (const auto& l : j.at("leaves")) {
    BahsbmModel::Leaf leaf;
    leaf.id = l.at("id").get<int>();
    leaf.vertices = l.at("vertices").get<std::size_t>();
    leaf.edge_budget = l.at("edge_budget").get<std::uint64_t>();
    leaf.m = l.at("m").get<std::size_t>();
    model.leaves.push_back(leaf);
  }
  for (const auto& i : j.at("inter"))
    model.inter.push_back({i.at("leaf_a").get<int>(), i.at("leaf_b").get<int>(),
                           i.at("count").get<std::uint64_t>()});
  model.hierarchy = tree_from_json(j.at("hierarchy"));
  return model;
}

std::string comparison_report_json(const ComparisonReport& r) {
  nlohmann::json j{{"real_nodes", r.real_nodes},
                   {"generated_nodes", r.generated_nodes},
                   {"real_edges", r.real_edges},
                   {"generated_edges", r.generated_edges},
                   {"real_weight", r.real_weight},
                   {"generated_weight", r.generated_weight},
                   {"ks_degree_distance", r.ks_degree_distance},
                   {"real_avg_path", r.real_avg_path},
                   {"generated_avg_path", r.generated_avg_path},
                   {"real_q", r.real_q},
                   {"generated_q", r.generated_q},
                   {"node_delta", r.node_delta()},
                   {"edge_delta", r.edge_delta()},
                   {"path_delta", r.path_delta()},
                   {"q_delta", r.q_delta()}};
  return j.dump(2);
}

ComparisonReport parse_comparison_report_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ComparisonReport r;
  r.real_nodes = j.at("real_nodes").get<std::size_t>();
  r.generated_nodes = j.at("generated_nodes").get<std::size_t>();
  r.real_edges = j.at("real_edges").get<std::size_t>();
  r.generated_edges = j.at("generated_edges").get<std::size_t>();
  r.real_weight = j.at("real_weight").get<std::uint64_t>();
  r.generated_weight = j.at("generated_weight").get<std::uint64_t>();
  r.ks_degree_distance = j.at("ks_degree_distance").get<double>();
  r.real_avg_path = j.at("real_avg_path").get<double>();
  r.generated_avg_path = j.at("generated_avg_path").get<double>();
  r.real_q = j.at("real_q").get<double>();
  r.generated_q = j.at("generated_q").get<double>();
  return r;
}

std::string hierarchy_json(const CommunityHierarchy& h) {
  return hierarchy_node_json(h.root).dump();
}

std::string file_digest(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : m.config) config[k] = v;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [p, d] : m.inputs)
    inputs.push_back({{"path", p}, {"digest", d}});
  nlohmann::json j{{"command", m.command},
                   {"config", config},
                   {"inputs", inputs},
                   {"outputs", m.outputs},
                   {"tool_version", kToolVersion},
                   {"wall_time_seconds", m.wall_time_seconds}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace orgnet::io
