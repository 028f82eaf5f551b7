#include "orgnet/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace orgnet {

namespace {

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::pair<int, int> civil_year_month(std::int64_t days) {
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m)};
}

bool parse_int(const char* begin, const char* end, int& out) {
  auto [p, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && p == end;
}

}  // namespace

std::string MonthKey::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

std::optional<MonthKey> MonthKey::parse(const std::string& s) {
  if (s.size() != 7 || s[4] != '-') return std::nullopt;
  int y = 0, m = 0;
  if (!parse_int(s.data(), s.data() + 4, y)) return std::nullopt;
  if (!parse_int(s.data() + 5, s.data() + 7, m)) return std::nullopt;
  if (m < 1 || m > 12) return std::nullopt;
  return MonthKey{y, m};
}

std::optional<std::int64_t> parse_iso8601(const std::string& s) {
  // YYYY-MM-DD[T ]hh:mm:ss[.frac][Z|+hh:mm|-hh:mm|+hhmm|-hhmm]
  if (s.size() < 19) return std::nullopt;
  const char* p = s.data();
  int y, mo, d, h, mi, se;
  if (!parse_int(p, p + 4, y) || p[4] != '-') return std::nullopt;
  if (!parse_int(p + 5, p + 7, mo) || p[7] != '-') return std::nullopt;
  if (!parse_int(p + 8, p + 10, d)) return std::nullopt;
  if (p[10] != 'T' && p[10] != ' ') return std::nullopt;
  if (!parse_int(p + 11, p + 13, h) || p[13] != ':') return std::nullopt;
  if (!parse_int(p + 14, p + 16, mi) || p[16] != ':') return std::nullopt;
  if (!parse_int(p + 17, p + 19, se)) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
    return std::nullopt;

  std::size_t i = 19;
  if (i < s.size() && s[i] == '.') {
    ++i;
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  int offset_min = 0;
  if (i < s.size()) {
    char c = s[i];
    if (c == 'Z') {
      ++i;
    } else if (c == '+' || c == '-') {
      int sign = c == '+' ? 1 : -1;
      ++i;
      if (i + 2 > s.size()) return std::nullopt;
      int oh = 0, om = 0;
      if (!parse_int(s.data() + i, s.data() + i + 2, oh)) return std::nullopt;
      i += 2;
      if (i < s.size() && s[i] == ':') ++i;
      if (i + 2 <= s.size()) {
        if (!parse_int(s.data() + i, s.data() + i + 2, om)) return std::nullopt;
        i += 2;
      }
      offset_min = sign * (oh * 60 + om);
    } else {
      return std::nullopt;
    }
  }
  if (i != s.size()) return std::nullopt;

  std::int64_t secs =
      days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
  return secs - static_cast<std::int64_t>(offset_min) * 60;
}

MonthKey month_of(std::int64_t epoch_seconds, int utc_offset_minutes) {
  std::int64_t shifted = epoch_seconds + static_cast<std::int64_t>(utc_offset_minutes) * 60;
  std::int64_t days = shifted / 86400;
  if (shifted < 0 && shifted % 86400 != 0) --days;
  auto [y, m] = civil_year_month(days);
  return {y, m};
}

namespace {

std::optional<Receipt> receipt_from_csv(const std::string& line,
                                        std::string& err) {
  // org_id,timestamp,sender,recipients  (recipients ';'-separated)
  std::array<std::string, 4> fields;
  std::size_t field = 0, start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      if (field >= 4) {
        err = "too many columns";
        return std::nullopt;
      }
      fields[field++] = line.substr(start, i - start);
      start = i + 1;
    }
  }
  if (field != 4) {
    err = "expected 4 columns, got " + std::to_string(field);
    return std::nullopt;
  }
  Receipt r;
  r.org_id = fields[0];
  auto ts = parse_iso8601(fields[1]);
  if (!ts) {
    err = "bad timestamp '" + fields[1] + "'";
    return std::nullopt;
  }
  r.epoch_seconds = *ts;
  r.sender = fields[2];
  std::size_t pos = 0;
  const std::string& rec = fields[3];
  while (pos <= rec.size()) {
    std::size_t sep = rec.find(';', pos);
    if (sep == std::string::npos) sep = rec.size();
    if (sep > pos) r.recipients.push_back(rec.substr(pos, sep - pos));
    pos = sep + 1;
  }
  if (r.org_id.empty() || r.sender.empty()) {
    err = "empty org_id or sender";
    return std::nullopt;
  }
  if (r.recipients.empty()) {
    err = "no recipients";
    return std::nullopt;
  }
  return r;
}

std::optional<Receipt> receipt_from_jsonl(const std::string& line,
                                          std::string& err) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    err = "invalid JSON object";
    return std::nullopt;
  }
  try {
    Receipt r;
    r.org_id = j.at("org_id").get<std::string>();
    std::string ts = j.at("timestamp").get<std::string>();
    auto secs = parse_iso8601(ts);
    if (!secs) {
      err = "bad timestamp '" + ts + "'";
      return std::nullopt;
    }
    r.epoch_seconds = *secs;
    r.sender = j.at("sender").get<std::string>();
    r.recipients = j.at("recipients").get<std::vector<std::string>>();
    if (r.org_id.empty() || r.sender.empty() || r.recipients.empty()) {
      err = "empty org_id, sender, or recipients";
      return std::nullopt;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    err = e.what();
    return std::nullopt;
  }
}

}  // namespace

ParseResult parse_receipts(std::istream& in, ReceiptFormat format,
                           bool fail_fast) {
  ParseResult out;
  std::string line;
  std::size_t lineno = 0;
  bool checked_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == ReceiptFormat::csv && !checked_header) {
      checked_header = true;
      if (line.rfind("org_id,", 0) == 0) continue;  // optional header row
    }
    std::string err;
    auto r = format == ReceiptFormat::csv ? receipt_from_csv(line, err)
                                          : receipt_from_jsonl(line, err);
    if (r) {
      out.receipts.push_back(std::move(*r));
    } else {
      if (fail_fast)
        throw std::runtime_error("line " + std::to_string(lineno) + ": " + err);
      out.errors.push_back({lineno, err});
    }
  }
  return out;
}

MonthlyNetworks monthly_networks_before_lcc(const std::vector<Receipt>& receipts,
                                            const IngestConfig& config) {
  std::map<OrgMonth, GraphBuilder> builders;
  for (const Receipt& r : receipts) {
    if (r.recipients.size() > config.max_recipients) continue;
    OrgMonth key{r.org_id, month_of(r.epoch_seconds, config.utc_offset_minutes)};
    GraphBuilder& b = builders[key];
    for (const std::string& rec : r.recipients) {
      if (rec == r.sender) continue;
      b.add(r.sender, rec, 1);
    }
  }
  MonthlyNetworks out;
  for (auto& [key, b] : builders) {
    WeightedGraph g = std::move(b).build();
    if (g.node_count() == 0) continue;  // only self-loop traffic
    out.emplace(key, std::move(g));
  }
  return out;
}

MonthlyNetworks receipts_to_monthly_networks(const std::vector<Receipt>& receipts,
                                             const IngestConfig& config) {
  MonthlyNetworks out = monthly_networks_before_lcc(receipts, config);
  for (auto& [key, g] : out) g = largest_connected_component(g);
  return out;
}

EligibilityReport filter_eligible_orgs(const MonthlyNetworks& networks,
                                       const IngestConfig& config) {
  EligibilityReport report;
  if (networks.empty()) return report;

  MonthKey lo = networks.begin()->first.month;
  MonthKey hi = lo;
  std::map<std::string, std::map<MonthKey, const WeightedGraph*>> by_org;
  for (const auto& [key, g] : networks) {
    lo = std::min(lo, key.month);
    hi = std::max(hi, key.month);
    by_org[key.org_id][key.month] = &g;
  }
  std::size_t span = 0;
  for (MonthKey m = lo; m <= hi; m = m.next()) ++span;

  for (const auto& [org, months] : by_org) {
    if (months.size() < span) {
      report.excluded.push_back(
          {org, "missing " + std::to_string(span - months.size()) +
                    " month(s) of " + std::to_string(span)});
      continue;
    }
    const WeightedGraph* worst = nullptr;
    MonthKey worst_month{};
    for (const auto& [mk, g] : months) {
      if (!worst || g->node_count() < worst->node_count()) {
        worst = g;
        worst_month = mk;
      }
    }
    if (worst->node_count() <= config.min_nodes) {
      report.excluded.push_back(
          {org, "only " + std::to_string(worst->node_count()) + " nodes in " +
                    worst_month.str() + " (need > " +
                    std::to_string(config.min_nodes) + ")"});
      continue;
    }
    for (const auto& [mk, g] : months)
      report.networks.emplace(OrgMonth{org, mk}, *g);
  }
  return report;
}

}  // namespace orgnet
