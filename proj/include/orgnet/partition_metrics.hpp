#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "orgnet/community.hpp"

namespace orgnet {

enum class NodePolicy { intersect, strict };

struct ContingencyTable {
  std::size_t n = 0;                  // effective node count
  std::vector<std::int64_t> row_sums; // community sizes of the first partition
  std::vector<std::int64_t> col_sums;
  struct Cell {
    int row;
    int col;
    std::int64_t count;
  };
  std::vector<Cell> cells;  // nonzero n_ij, sorted by (row, col)
};

// Cross-tabulates two partitions. strict requires identical node sets;
// intersect restricts both to the common nodes.
ContingencyTable contingency_table(const Partition& p1, const Partition& p2,
                                   NodePolicy policy = NodePolicy::intersect);

// RI = (a + b) / C(n,2): agreeing pairs over all pairs.
double rand_index(const ContingencyTable& t);

// Hubert-Arabie adjustment; 1 iff the partitions are identical on the
// effective node set, ~0 for independent random partitions. Evaluated in
// exact integer arithmetic.
double adjusted_rand_index(const ContingencyTable& t);

inline double adjusted_rand_index(const Partition& p1, const Partition& p2,
                                  NodePolicy policy = NodePolicy::intersect) {
  return adjusted_rand_index(contingency_table(p1, p2, policy));
}

struct AriPoint {
  double ari;
  std::size_t common_nodes;
};

// Consecutive-pair ARI over a partition series; node policy is intersect
// since month-to-month node sets differ. A pair whose common node set is too
// small to compare yields nullopt.
std::vector<std::optional<AriPoint>> month_over_month_ari(
    const std::vector<Partition>& series);

}  // namespace orgnet
