// orgnet: batch analysis of monthly communication networks and fitted
// generative models. Subcommands: ingest, analyze, bootstrap, compare-years,
// generate, toy-example. Formats are documented in docs/formats.md.
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orgnet/community.hpp"
#include "orgnet/generators.hpp"
#include "orgnet/graph.hpp"
#include "orgnet/ingest.hpp"
#include "orgnet/io.hpp"
#include "orgnet/partition_metrics.hpp"
#include "orgnet/rng.hpp"
#include "orgnet/stats.hpp"

namespace fs = std::filesystem;
using namespace orgnet;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

std::uint64_t org_month_seed(std::uint64_t base, const std::string& org,
                             MonthKey month) {
  std::uint64_t tag = hash_string(org) ^
                      (static_cast<std::uint64_t>(month.year) * 12 +
                       static_cast<std::uint64_t>(month.month));
  return mix_seed(base, tag);
}

ReceiptFormat format_for(const std::string& flag, const fs::path& path) {
  if (flag == "csv") return ReceiptFormat::csv;
  if (flag == "jsonl") return ReceiptFormat::jsonl;
  return path.extension() == ".jsonl" ? ReceiptFormat::jsonl
                                      : ReceiptFormat::csv;
}

std::map<std::string, std::string> read_org_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open org meta: " + path.string());
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("org_id,", 0) == 0) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("org meta line " + std::to_string(lineno) +
                               ": expected org_id,geography");
    meta[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return meta;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

// ---------------------------------------------------------------- ingest ---

struct IngestArgs {
  std::string input;
  std::string format = "auto";
  std::string out;
  IngestConfig config;
  bool fail_fast = false;
  bool keep_ineligible = false;
};

int run_ingest(const IngestArgs& args) {
  Timer timer;
  fs::path input(args.input);
  std::ifstream in(input);
  if (!in) {
    std::cerr << "cannot open " << input << "\n";
    return 2;
  }
  ParseResult parsed =
      parse_receipts(in, format_for(args.format, input), args.fail_fast);

  MonthlyNetworks networks =
      receipts_to_monthly_networks(parsed.receipts, args.config);
  std::vector<EligibilityReport::Excluded> excluded;
  if (!args.keep_ineligible) {
    EligibilityReport report = filter_eligible_orgs(networks, args.config);
    networks = std::move(report.networks);
    excluded = std::move(report.excluded);
  }

  fs::path out(args.out);
  fs::create_directories(out);
  io::RunManifest manifest;
  manifest.command = "ingest";
  manifest.config = {
      {"input", args.input},
      {"format", args.format},
      {"max_recipients", std::to_string(args.config.max_recipients)},
      {"min_nodes", std::to_string(args.config.min_nodes)},
      {"tz_offset_minutes", std::to_string(args.config.utc_offset_minutes)},
      {"keep_ineligible", args.keep_ineligible ? "true" : "false"}};
  manifest.inputs = {{args.input, io::file_digest(input)}};

  for (const auto& [key, g] : networks) {
    fs::path dir = out / key.org_id;
    fs::path edge_path = dir / (key.month.str() + ".csv");
    io::write_edge_csv(edge_path, g);
    io::GraphMeta meta{key.org_id, key.month.str(), g.node_count(),
                       g.edge_count(), g.total_weight()};
    io::write_graph_meta(dir / (key.month.str() + ".json"), meta);
    manifest.outputs.push_back(fs::relative(edge_path, out).generic_string());
  }

  nlohmann::json report;
  report["receipts_parsed"] = parsed.receipts.size();
  report["parse_errors"] = nlohmann::json::array();
  for (const auto& e : parsed.errors)
    report["parse_errors"].push_back(
        {{"line", e.line}, {"message", e.message}});
  report["excluded_orgs"] = nlohmann::json::array();
  for (const auto& e : excluded)
    report["excluded_orgs"].push_back(
        {{"org_id", e.org_id}, {"reason", e.reason}});
  write_text(out / "ingest_report.json", report.dump(2));
  manifest.outputs.push_back("ingest_report.json");

  manifest.wall_time_seconds = timer.seconds();
  io::write_manifest(out / "manifest.json", manifest);
  std::cout << "ingest: " << networks.size() << " org-month networks, "
            << parsed.errors.size() << " parse errors, " << excluded.size()
            << " orgs excluded\n";
  return 0;
}

// --------------------------------------------------------------- analyze ---

struct AnalyzeArgs {
  std::string input;
  std::string out;
  std::string format = "auto";
  std::string org_meta;
  IngestConfig config;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct OrgMonthResult {
  OrgMonth key;
  WeightedGraph lcc;
  Partition partition;
  double q = 0.0;
  std::string error;  // nonempty on failure
};

MonthlyNetworks load_prebuilt(
    const fs::path& dir, std::vector<std::pair<OrgMonth, std::string>>& bad) {
  MonthlyNetworks networks;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".csv") continue;
    if (!MonthKey::parse(entry.path().stem().string())) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::string org = path.parent_path().filename().string();
    MonthKey month = *MonthKey::parse(path.stem().string());
    try {
      networks.emplace(OrgMonth{org, month}, io::read_edge_csv(path));
    } catch (const std::exception& e) {
      bad.emplace_back(OrgMonth{org, month}, e.what());
    }
  }
  return networks;
}

int run_analyze(const AnalyzeArgs& args) {
  Timer timer;
  fs::path input(args.input);
  fs::path out(args.out);
  fs::create_directories(out);

  io::RunManifest manifest;
  manifest.command = "analyze";
  manifest.config = {
      {"input", args.input},
      {"resolution", io::format_double(args.resolution)},
      {"seed", std::to_string(args.seed)},
      {"threads", std::to_string(args.threads)},
      {"max_recipients", std::to_string(args.config.max_recipients)},
      {"min_nodes", std::to_string(args.config.min_nodes)},
      {"tz_offset_minutes", std::to_string(args.config.utc_offset_minutes)}};

  std::vector<std::pair<OrgMonth, std::string>> failures;
  MonthlyNetworks networks;
  if (fs::is_directory(input)) {
    networks = load_prebuilt(input, failures);
  } else {
    std::ifstream in(input);
    if (!in) {
      std::cerr << "cannot open " << input << "\n";
      return 2;
    }
    manifest.inputs = {{args.input, io::file_digest(input)}};
    ParseResult parsed =
        parse_receipts(in, format_for(args.format, input), false);
    for (const auto& e : parsed.errors)
      failures.emplace_back(OrgMonth{"<parse>", {}}, "line " +
                                std::to_string(e.line) + ": " + e.message);
    networks = receipts_to_monthly_networks(parsed.receipts, args.config);
    EligibilityReport report = filter_eligible_orgs(networks, args.config);
    networks = std::move(report.networks);
  }

  std::map<std::string, std::string> geo;
  if (!args.org_meta.empty()) geo = read_org_meta(args.org_meta);

  // Leiden per org-month, parallel over units; per-unit seeds derive from
  // (seed, org, month) so the thread count never changes results.
  std::vector<const MonthlyNetworks::value_type*> units;
  units.reserve(networks.size());
  for (const auto& kv : networks) units.push_back(&kv);
  std::vector<OrgMonthResult> results(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= units.size()) return;
      const auto& [key, graph] = *units[i];
      OrgMonthResult& r = results[i];
      r.key = key;
      try {
        r.lcc = largest_connected_component(graph);
        r.partition = leiden(r.lcc, args.resolution,
                             org_month_seed(args.seed, key.org_id, key.month));
        r.q = modularity(r.lcc, r.partition, args.resolution);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  unsigned nthreads = std::max(1u, args.threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::map<std::string, std::vector<const OrgMonthResult*>> by_org;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      failures.emplace_back(r.key, r.error);
      continue;
    }
    by_org[r.key.org_id].push_back(&r);
  }

  std::vector<OrgMonthRecord> records;
  std::vector<io::AriSeriesRow> ari_rows;
  std::ostringstream nq;
  nq << "n,Q\n";
  for (auto& [org, months] : by_org) {
    std::sort(months.begin(), months.end(),
              [](const OrgMonthResult* a, const OrgMonthResult* b) {
                return a->key.month < b->key.month;
              });
    for (std::size_t i = 0; i < months.size(); ++i) {
      const OrgMonthResult& r = *months[i];
      OrgMonthRecord rec;
      rec.org_id = org;
      rec.month = r.key.month;
      rec.node_count = r.lcc.node_count();
      rec.edge_count = r.lcc.edge_count();
      rec.total_weight = r.lcc.total_weight();
      rec.q = r.q;
      auto it = geo.find(org);
      if (it != geo.end()) rec.geography = it->second;
      if (i > 0 && months[i - 1]->key.month.next() == r.key.month) {
        ContingencyTable t = contingency_table(
            months[i - 1]->partition, r.partition, NodePolicy::intersect);
        if (t.n >= 2) {
          rec.ari_prev = adjusted_rand_index(t);
          ari_rows.push_back({org, r.key.month, rec.ari_prev, t.n});
        } else {
          ari_rows.push_back({org, r.key.month, std::nullopt, t.n});
        }
      }
      records.push_back(rec);
      nq << rec.node_count << ',' << io::format_double(rec.q) << '\n';

      io::write_partition_csv(
          out / "partitions" / org / (r.key.month.str() + ".csv"), r.partition);
    }
  }

  {
    std::ostringstream records_csv;
    io::write_records_csv(records_csv, records);
    write_text(out / "records.csv", records_csv.str());
  }
  {
    std::ostringstream ari_csv;
    io::write_ari_series_csv(ari_csv, ari_rows);
    write_text(out / "ari_series.csv", ari_csv.str());
  }
  write_text(out / "nq_pairs.csv", nq.str());

  {
    std::ostringstream summary;
    summary << "month,group,metric,mean,stderr,count\n";
    auto append = [&](SummaryMetric metric, const std::string& name,
                      bool grouped) {
      for (const auto& row : timeseries_summary(records, grouped, metric)) {
        summary << row.month.str() << ',' << row.group << ',' << name << ','
                << io::format_double(row.mean) << ','
                << io::format_double(row.stderr_of_mean) << ',' << row.count
                << '\n';
      }
    };
    append(SummaryMetric::q, "Q", false);
    append(SummaryMetric::ari_prev, "ari_prev", false);
    append(SummaryMetric::total_weight, "total_weight", false);
    append(SummaryMetric::mean_weighted_degree, "mean_weighted_degree", false);
    if (!geo.empty()) {
      append(SummaryMetric::q, "Q", true);
      append(SummaryMetric::ari_prev, "ari_prev", true);
      append(SummaryMetric::total_weight, "total_weight", true);
      append(SummaryMetric::mean_weighted_degree, "mean_weighted_degree", true);
    }
    write_text(out / "summary.csv", summary.str());
  }

  nlohmann::json fail_json = nlohmann::json::array();
  for (const auto& [key, msg] : failures)
    fail_json.push_back(
        {{"org_id", key.org_id}, {"month", key.month.str()}, {"error", msg}});
  write_text(out / "failures.json", fail_json.dump(2));

  manifest.outputs = {"records.csv", "ari_series.csv", "nq_pairs.csv",
                      "summary.csv", "failures.json"};
  manifest.wall_time_seconds = timer.seconds();
  io::write_manifest(out / "manifest.json", manifest);

  std::cout << "analyze: " << records.size() << " org-month records, "
            << failures.size() << " failures\n";
  return failures.empty() ? 0 : 1;
}

// ------------------------------------------------------------- bootstrap ---

struct BootstrapArgs {
  std::string graph;
  std::string out;
  int iterations = 1000;
  std::uint64_t seed = 0;
  double resolution = 1.0;
};

int run_bootstrap(const BootstrapArgs& args) {
  Timer timer;
  WeightedGraph g = io::read_edge_csv(fs::path(args.graph));
  BootstrapResult r =
      bootstrap_modularity(g, args.iterations, args.seed, args.resolution);
  fs::path out(args.out);
  fs::create_directories(out);
  write_text(out / "bootstrap.json", io::bootstrap_result_json(r));

  io::RunManifest manifest;
  manifest.command = "bootstrap";
  manifest.config = {{"graph", args.graph},
                     {"bootstrap_iterations", std::to_string(args.iterations)},
                     {"seed", std::to_string(args.seed)},
                     {"resolution", io::format_double(args.resolution)}};
  manifest.inputs = {{args.graph, io::file_digest(args.graph)}};
  manifest.outputs = {"bootstrap.json"};
  manifest.wall_time_seconds = timer.seconds();
  io::write_manifest(out / "manifest.json", manifest);

  std::cout << "bootstrap: observed " << io::format_double(r.observed_q)
            << ", " << format_plus_minus(r.mean, r.sdev) << "\n";
  return 0;
}

// -------------------------------------------------------- compare-years ---

struct CompareYearsArgs {
  std::string records;
  std::string out;
  std::string org_meta;
  int month = 4;
  int year1 = 2019;
  int year2 = 2020;
  std::size_t bins = 30;
};

int run_compare_years(const CompareYearsArgs& args) {
  Timer timer;
  std::vector<OrgMonthRecord> records =
      io::read_records_csv(fs::path(args.records));
  std::map<std::string, std::string> geo;
  if (!args.org_meta.empty()) {
    geo = read_org_meta(args.org_meta);
    for (auto& r : records) {
      auto it = geo.find(r.org_id);
      if (it != geo.end()) r.geography = it->second;
    }
  }

  YoyDiffs diffs =
      yoy_paired_diffs(records, args.month, args.year1, args.year2);
  fs::path out(args.out);
  fs::create_directories(out);

  char label[64];
  std::snprintf(label, sizeof label, "%04d-%02d minus %04d-%02d", args.year2,
                args.month, args.year1, args.month);

  std::vector<double> values;
  values.reserve(diffs.diffs.size());
  for (const auto& [org, d] : diffs.diffs) values.push_back(d);

  {
    std::ostringstream csv;
    csv << "org_id,q_diff\n";
    for (const auto& [org, d] : diffs.diffs)
      csv << org << ',' << io::format_double(d) << '\n';
    write_text(out / "diffs.csv", csv.str());
  }
  {
    std::ostringstream csv;
    io::write_diff_histogram_csv(csv, io::histogram_bins(values, args.bins),
                                 label);
    write_text(out / "diff_histogram.csv", csv.str());
  }
  {
    bool testable = false;
    for (double v : values) testable |= v != 0.0;
    if (testable) {
      WilcoxonResult w = wilcoxon_signed_rank(values);
      write_text(out / "wilcoxon.json", io::wilcoxon_report_json(w));
    } else {
      write_text(out / "wilcoxon.json",
                 "{\n  \"error\": \"all differences zero\"\n}");
    }
  }
  if (!geo.empty()) {
    // per-geography mean Q in both years plus the change
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
        by_geo;
    for (const auto& r : records) {
      if (r.month.month != args.month || !r.geography) continue;
      if (r.month.year == args.year1) by_geo[*r.geography].first.push_back(r.q);
      if (r.month.year == args.year2)
        by_geo[*r.geography].second.push_back(r.q);
    }
    std::ostringstream csv;
    csv << "geography,mean_q_" << args.year1 << ",mean_q_" << args.year2
        << ",delta_q\n";
    for (const auto& [g, qs] : by_geo) {
      if (qs.first.empty() || qs.second.empty()) continue;
      double m1 = 0, m2 = 0;
      for (double v : qs.first) m1 += v;
      for (double v : qs.second) m2 += v;
      m1 /= static_cast<double>(qs.first.size());
      m2 /= static_cast<double>(qs.second.size());
      char row[160];
      std::snprintf(row, sizeof row, "%s,%.3f,%.3f,%.3f\n", g.c_str(), m1, m2,
                    m2 - m1);
      csv << row;
    }
    write_text(out / "by_geography.csv", csv.str());
  }

  io::RunManifest manifest;
  manifest.command = "compare-years";
  manifest.config = {{"records", args.records},
                     {"month", std::to_string(args.month)},
                     {"year1", std::to_string(args.year1)},
                     {"year2", std::to_string(args.year2)},
                     {"bins", std::to_string(args.bins)}};
  manifest.inputs = {{args.records, io::file_digest(args.records)}};
  manifest.outputs = {"diffs.csv", "diff_histogram.csv", "wilcoxon.json"};
  manifest.wall_time_seconds = timer.seconds();
  io::write_manifest(out / "manifest.json", manifest);

  std::cout << "compare-years: " << diffs.diffs.size() << " paired orgs, "
            << diffs.skipped_orgs << " skipped\n";
  return 0;
}

// -------------------------------------------------------------- generate ---

struct GenerateArgs {
  std::string graph;
  std::string mode = "bahsbm";
  std::string out;
  int samples = 1;
  std::uint64_t seed = 0;
  std::size_t n_max = 250;
};

int run_generate(const GenerateArgs& args) {
  Timer timer;
  WeightedGraph target = io::read_edge_csv(fs::path(args.graph));
  fs::path out(args.out);
  fs::create_directories(out);

  io::RunManifest manifest;
  manifest.command = "generate";
  manifest.config = {{"graph", args.graph},
                     {"mode", args.mode},
                     {"samples", std::to_string(args.samples)},
                     {"seed", std::to_string(args.seed)},
                     {"n_max", std::to_string(args.n_max)}};
  manifest.inputs = {{args.graph, io::file_digest(args.graph)}};

  std::vector<WeightedGraph> samples;
  if (args.mode == "bahsbm") {
    CommunityHierarchy hierarchy =
        hierarchical_leiden(target, args.n_max, args.seed);
    BahsbmModel model = fit_bahsbm(target, hierarchy, args.n_max);
    write_text(out / "model.json", io::bahsbm_model_json(model));
    write_text(out / "hierarchy.json", io::hierarchy_json(hierarchy));
    manifest.outputs.push_back("model.json");
    manifest.outputs.push_back("hierarchy.json");
    for (int s = 0; s < args.samples; ++s)
      samples.push_back(sample_bahsbm(model, mix_seed(args.seed, s)));
  } else if (args.mode == "sbm-er" || args.mode == "sbm-ba") {
    Partition root = leiden(target, 1.0, args.seed);
    AposterioriSbmFit fit = fit_aposteriori_sbm(target, root);
    nlohmann::json j;
    j["blocks"] = nlohmann::json::array();
    for (std::size_t b = 0; b < fit.block_sizes.size(); ++b)
      j["blocks"].push_back({{"id", b},
                             {"vertices", fit.block_sizes[b]},
                             {"intra_edges", fit.intra_edges[b]}});
    j["inter"] = nlohmann::json::array();
    for (const auto& [key, c] : fit.inter_edges)
      j["inter"].push_back(
          {{"block_a", key.first}, {"block_b", key.second}, {"count", c}});
    write_text(out / "model.json", j.dump(2));
    manifest.outputs.push_back("model.json");
    IntraModel intra = args.mode == "sbm-er" ? IntraModel::er : IntraModel::ba;
    for (int s = 0; s < args.samples; ++s)
      samples.push_back(sample_root_sbm(fit, intra, mix_seed(args.seed, s)));
  } else {
    std::cerr << "unknown mode '" << args.mode
              << "' (expected sbm-er, sbm-ba, or bahsbm)\n";
    return 2;
  }

  for (int s = 0; s < args.samples; ++s) {
    std::string base = "sample_" + std::to_string(s);
    io::write_edge_csv(out / (base + ".csv"), samples[s]);
    // sidecar carries the node count; the edge list alone cannot represent
    // isolated vertices
    io::GraphMeta meta{base, "", samples[s].node_count(),
                       samples[s].edge_count(), samples[s].total_weight()};
    io::write_graph_meta(out / (base + ".json"), meta);
    ComparisonReport report =
        compare_graphs(target, samples[s], mix_seed(args.seed, 0xc0ULL + s));
    write_text(out / (base + "_compare.json"),
               io::comparison_report_json(report));
    manifest.outputs.push_back(base + ".csv");
    manifest.outputs.push_back(base + ".json");
    manifest.outputs.push_back(base + "_compare.json");
  }

  manifest.wall_time_seconds = timer.seconds();
  io::write_manifest(out / "manifest.json", manifest);
  std::cout << "generate: mode " << args.mode << ", " << args.samples
            << " sample(s)\n";
  return 0;
}

// ----------------------------------------------------------- toy-example ---

struct ToyArgs {
  int seeds = 500;
  std::uint64_t seed = 0;
  std::string out;
};

int run_toy(const ToyArgs& args) {
  // two-block swap scenario: blocks of 10, two members exchanged each way
  std::vector<std::string> ids;
  ids.reserve(20);
  for (int i = 0; i < 20; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "n%02d", i);
    ids.emplace_back(buf);
  }
  std::vector<int> before(20), after(20);
  for (int i = 0; i < 20; ++i) {
    before[i] = i < 10 ? 0 : 1;
    bool moved_up = i == 8 || i == 9;
    bool moved_down = i == 18 || i == 19;
    after[i] = moved_up ? 1 : moved_down ? 0 : before[i];
  }
  Partition p1 = Partition::from_labels(ids, before);
  Partition p2 = Partition::from_labels(ids, after);
  ContingencyTable table = contingency_table(p1, p2, NodePolicy::strict);
  double ri = rand_index(table);
  double ari = adjusted_rand_index(table);

  auto mean_q = [&](double between) {
    SbmSpec spec{{10, 10}, {{0.50, between}, {between, 0.50}}};
    double sum = 0.0;
    for (int s = 0; s < args.seeds; ++s) {
      WeightedGraph g = sample_sbm(spec, mix_seed(args.seed, s));
      Partition p = leiden(g, 1.0, mix_seed(args.seed, 0x9000 + s));
      sum += modularity(g, p);
    }
    return sum / args.seeds;
  };
  double q_low_between = mean_q(0.05);
  double q_high_between = mean_q(0.15);

  nlohmann::json j;
  j["swap_scenario"] = {{"rand_index", ri},
                        {"adjusted_rand_index", ari},
                        {"contingency", {{8, 2}, {2, 8}}}};
  j["sbm_mean_q"] = {{"seeds", args.seeds},
                     {"between_0.05", q_low_between},
                     {"between_0.15", q_high_between}};
  std::string text = j.dump(2);
  std::cout << text << "\n";
  if (!args.out.empty()) {
    fs::create_directories(args.out);
    write_text(fs::path(args.out) / "toy.json", text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "monthly communication-network analytics and generative models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand(
      "ingest", "receipts -> per-(org,month) edge lists and metadata");
  ingest->add_option("--input", ingest_args.input, "receipts file")->required();
  ingest->add_option("--format", ingest_args.format, "csv|jsonl|auto");
  ingest->add_option("--out", ingest_args.out, "output directory")->required();
  ingest->add_option("--max-recipients", ingest_args.config.max_recipients,
                     "drop receipts with more recipients");
  ingest->add_option("--min-nodes", ingest_args.config.min_nodes,
                     "eligibility threshold (strict >)");
  ingest->add_option("--tz-offset-minutes",
                     ingest_args.config.utc_offset_minutes,
                     "month boundary timezone offset");
  ingest->add_flag("--fail-fast", ingest_args.fail_fast,
                   "abort on first malformed row");
  ingest->add_flag("--keep-ineligible", ingest_args.keep_ineligible,
                   "skip the eligibility filter");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand(
      "analyze", "org-month records, partitions, ARI series, summaries");
  analyze
      ->add_option("--input", analyze_args.input,
                   "receipts file or directory of <org>/<YYYY-MM>.csv")
      ->required();
  analyze->add_option("--out", analyze_args.out, "output directory")
      ->required();
  analyze->add_option("--format", analyze_args.format, "csv|jsonl|auto");
  analyze->add_option("--org-meta", analyze_args.org_meta,
                      "org_id,geography CSV for grouped summaries");
  analyze->add_option("--resolution", analyze_args.resolution,
                      "Leiden resolution");
  analyze->add_option("--seed", analyze_args.seed, "base seed");
  analyze->add_option("--threads", analyze_args.threads,
                      "parallelism across org-months");
  analyze->add_option("--max-recipients", analyze_args.config.max_recipients,
                      "receipts mode: recipient cutoff");
  analyze->add_option("--min-nodes", analyze_args.config.min_nodes,
                      "receipts mode: eligibility threshold");
  analyze->add_option("--tz-offset-minutes",
                      analyze_args.config.utc_offset_minutes,
                      "receipts mode: month boundary offset");

  BootstrapArgs bootstrap_args;
  auto* bootstrap = app.add_subcommand(
      "bootstrap", "modularity bootstrap for one edge-list graph");
  bootstrap->add_option("--graph", bootstrap_args.graph, "edge CSV")
      ->required();
  bootstrap->add_option("--out", bootstrap_args.out, "output directory")
      ->required();
  bootstrap->add_option("--bootstrap-iterations", bootstrap_args.iterations,
                        "resampling iterations");
  bootstrap->add_option("--seed", bootstrap_args.seed, "base seed");
  bootstrap->add_option("--resolution", bootstrap_args.resolution,
                        "Leiden resolution");

  CompareYearsArgs cy_args;
  auto* cy = app.add_subcommand(
      "compare-years", "paired year-over-year modularity differences");
  cy->add_option("--records", cy_args.records, "records.csv from analyze")
      ->required();
  cy->add_option("--out", cy_args.out, "output directory")->required();
  cy->add_option("--month", cy_args.month, "calendar month 1..12");
  cy->add_option("--year1", cy_args.year1, "baseline year");
  cy->add_option("--year2", cy_args.year2, "comparison year");
  cy->add_option("--org-meta", cy_args.org_meta, "org_id,geography CSV");
  cy->add_option("--bins", cy_args.bins, "histogram bin count");

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand(
      "generate", "fit a generative model and sample graphs from it");
  gen->add_option("--graph", gen_args.graph, "target edge CSV")->required();
  gen->add_option("--mode", gen_args.mode, "sbm-er|sbm-ba|bahsbm");
  gen->add_option("--out", gen_args.out, "output directory")->required();
  gen->add_option("--samples", gen_args.samples, "number of samples");
  gen->add_option("--seed", gen_args.seed, "base seed");
  gen->add_option("--n-max", gen_args.n_max, "max leaf community size");

  ToyArgs toy_args;
  auto* toy = app.add_subcommand(
      "toy-example", "two-block swap ARI and SBM mean-modularity example");
  toy->add_option("--seeds", toy_args.seeds, "SBM sample count");
  toy->add_option("--seed", toy_args.seed, "base seed");
  toy->add_option("--out", toy_args.out, "optional output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return run_ingest(ingest_args);
    if (*analyze) return run_analyze(analyze_args);
    if (*bootstrap) return run_bootstrap(bootstrap_args);
    if (*cy) return run_compare_years(cy_args);
    if (*gen) return run_generate(gen_args);
    if (*toy) return run_toy(toy_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
