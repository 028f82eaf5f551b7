#include "orgnet/partition_metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace orgnet {

namespace {

using int128 = __int128;

inline int128 choose2(std::int64_t n) {
  return static_cast<int128>(n) * (n - 1) / 2;
}

struct PairSums {
  int128 sum_cells = 0;  // sum C(n_ij, 2)
  int128 sum_rows = 0;   // sum C(a_i, 2)
  int128 sum_cols = 0;   // sum C(b_j, 2)
  int128 total = 0;      // C(n, 2)
};

PairSums pair_sums(const ContingencyTable& t) {
  PairSums s;
  for (const auto& c : t.cells) s.sum_cells += choose2(c.count);
  for (auto a : t.row_sums) s.sum_rows += choose2(a);
  for (auto b : t.col_sums) s.sum_cols += choose2(b);
  s.total = choose2(static_cast<std::int64_t>(t.n));
  return s;
}

bool identical_partitions(const ContingencyTable& t) {
  // identical iff every nonzero cell equals its whole row and column
  if (t.cells.size() != t.row_sums.size() ||
      t.cells.size() != t.col_sums.size())
    return false;
  for (const auto& c : t.cells)
    if (c.count != t.row_sums[c.row] || c.count != t.col_sums[c.col])
      return false;
  return true;
}

}  // namespace

ContingencyTable contingency_table(const Partition& p1, const Partition& p2,
                                   NodePolicy policy) {
  if (policy == NodePolicy::strict) {
    std::size_t diff = 0;
    for (const auto& [id, c] : p1.assignment)
      if (!p2.assignment.count(id)) ++diff;
    for (const auto& [id, c] : p2.assignment)
      if (!p1.assignment.count(id)) ++diff;
    if (diff > 0)
      throw std::invalid_argument(
          "strict node policy: node sets differ (symmetric difference of " +
          std::to_string(diff) + " nodes)");
  }

  // relabel over the common nodes only, so sizes reflect the effective set
  std::map<int, int> rows, cols;
  std::map<std::pair<int, int>, std::int64_t> counts;
  std::size_t n = 0;
  for (const auto& [id, c1] : p1.assignment) {
    auto it = p2.assignment.find(id);
    if (it == p2.assignment.end()) continue;
    int r = rows.try_emplace(c1, static_cast<int>(rows.size())).first->second;
    int c = cols.try_emplace(it->second, static_cast<int>(cols.size()))
                .first->second;
    ++counts[{r, c}];
    ++n;
  }

  ContingencyTable t;
  t.n = n;
  t.row_sums.assign(rows.size(), 0);
  t.col_sums.assign(cols.size(), 0);
  for (const auto& [rc, cnt] : counts) {
    t.cells.push_back({rc.first, rc.second, cnt});
    t.row_sums[rc.first] += cnt;
    t.col_sums[rc.second] += cnt;
  }
  return t;
}

double rand_index(const ContingencyTable& t) {
  if (t.n < 2) throw std::invalid_argument("rand index needs n >= 2");
  PairSums s = pair_sums(t);
  // a = agreeing together, b = agreeing apart
  int128 a = s.sum_cells;
  int128 b = s.total - s.sum_rows - s.sum_cols + s.sum_cells;
  return static_cast<double>(a + b) / static_cast<double>(s.total);
}

double adjusted_rand_index(const ContingencyTable& t) {
  if (t.n < 2) throw std::invalid_argument("adjusted rand index needs n >= 2");
  PairSums s = pair_sums(t);
  // ARI = (sum_cells - E) / (mean(sum_rows, sum_cols) - E) with
  // E = sum_rows * sum_cols / total; scaled by 2*total to stay integral
  int128 num = 2 * (s.sum_cells * s.total - s.sum_rows * s.sum_cols);
  int128 den = (s.sum_rows + s.sum_cols) * s.total - 2 * s.sum_rows * s.sum_cols;
  if (den == 0) {
    if (identical_partitions(t)) return 1.0;
    throw std::invalid_argument(
        "adjusted rand index undefined: degenerate partitions disagree");
  }
  return static_cast<double>(static_cast<long double>(num) /
                             static_cast<long double>(den));
}

std::vector<std::optional<AriPoint>> month_over_month_ari(
    const std::vector<Partition>& series) {
  if (series.size() < 2)
    throw std::invalid_argument("need at least two partitions");
  std::vector<std::optional<AriPoint>> out;
  out.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    ContingencyTable t =
        contingency_table(series[i - 1], series[i], NodePolicy::intersect);
    if (t.n < 2) {
      out.push_back(std::nullopt);
      continue;
    }
    out.push_back(AriPoint{adjusted_rand_index(t), t.n});
  }
  return out;
}

}  // namespace orgnet
