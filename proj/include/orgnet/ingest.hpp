#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orgnet/graph.hpp"

namespace orgnet {

struct MonthKey {
  int year = 0;
  int month = 0;  // 1..12

  auto operator<=>(const MonthKey&) const = default;
  std::string str() const;  // "YYYY-MM"
  static std::optional<MonthKey> parse(const std::string& s);
  MonthKey next() const {
    return month == 12 ? MonthKey{year + 1, 1} : MonthKey{year, month + 1};
  }
};

// Epoch seconds for an ISO-8601 instant, e.g. 2020-03-31T23:59:59Z,
// 2020-03-31T23:59:59+05:30, or without a zone designator (treated as UTC).
// Fractional seconds are accepted and truncated.
std::optional<std::int64_t> parse_iso8601(const std::string& s);

// Calendar month of an instant after shifting by a fixed UTC offset.
MonthKey month_of(std::int64_t epoch_seconds, int utc_offset_minutes);

struct Receipt {
  std::string org_id;
  std::int64_t epoch_seconds = 0;
  std::string sender;
  std::vector<std::string> recipients;
};

struct IngestConfig {
  std::size_t max_recipients = 4;  // receipts above this are dropped entirely
  std::size_t min_nodes = 2000;    // eligibility is strict: |V| > min_nodes
  int utc_offset_minutes = 0;      // month boundary timezone
};

enum class ReceiptFormat { csv, jsonl };

struct ParseError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<Receipt> receipts;
  std::vector<ParseError> errors;
};

// Streaming parse. CSV columns: org_id,timestamp,sender,recipients with
// ';'-separated recipients. JSONL mirrors the same fields with recipients as
// an array. Malformed rows are collected with their line numbers; fail_fast
// throws on the first one instead.
ParseResult parse_receipts(std::istream& in, ReceiptFormat format,
                           bool fail_fast = false);

struct OrgMonth {
  std::string org_id;
  MonthKey month;
  auto operator<=>(const OrgMonth&) const = default;
};

using MonthlyNetworks = std::map<OrgMonth, WeightedGraph>;

// Aggregated per-(org, month) graphs before any component reduction: each
// retained receipt adds weight 1 to (sender, r) for every recipient r !=
// sender; receipts with more than max_recipients recipients contribute
// nothing.
MonthlyNetworks monthly_networks_before_lcc(const std::vector<Receipt>& receipts,
                                            const IngestConfig& config);

// Same, reduced to the largest connected component per graph.
MonthlyNetworks receipts_to_monthly_networks(const std::vector<Receipt>& receipts,
                                             const IngestConfig& config);

struct EligibilityReport {
  MonthlyNetworks networks;
  struct Excluded {
    std::string org_id;
    std::string reason;
  };
  std::vector<Excluded> excluded;
};

// Retains an org only if it has a network for every month of the overall
// input range and each month's node count strictly exceeds min_nodes.
EligibilityReport filter_eligible_orgs(const MonthlyNetworks& networks,
                                       const IngestConfig& config);

}  // namespace orgnet
