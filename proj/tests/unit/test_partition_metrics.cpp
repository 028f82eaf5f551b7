#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "orgnet/partition_metrics.hpp"
#include "orgnet/rng.hpp"

using namespace orgnet;

namespace {

std::vector<std::string> numbered_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i)
    ids.push_back("n" + std::string(i < 10 ? "0" : "") + std::to_string(i));
  return ids;
}

// the two-block swap scenario: 20 nodes, two blocks of ten, two members
// exchanged in each direction between the observations
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

std::int64_t cell(const ContingencyTable& t, int r, int c) {
  for (const auto& x : t.cells)
    if (x.row == r && x.col == c) return x.count;
  return 0;
}

}  // namespace

TEST_CASE("contingency: identical two-block partitions are diagonal") {
  auto ids = numbered_ids(20);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) labels[i] = i < 10 ? 0 : 1;
  Partition p = Partition::from_labels(ids, labels);
  ContingencyTable t = contingency_table(p, p, NodePolicy::strict);
  CHECK(t.n == 20);
  CHECK(cell(t, 0, 0) == 10);
  CHECK(cell(t, 1, 1) == 10);
  CHECK(cell(t, 0, 1) == 0);
  CHECK(cell(t, 1, 0) == 0);
}

TEST_CASE("contingency: swap scenario gives [[8,2],[2,8]]") {
  auto [p1, p2] = swap_scenario();
  ContingencyTable t = contingency_table(p1, p2, NodePolicy::strict);
  CHECK(t.n == 20);
  CHECK(cell(t, 0, 0) == 8);
  CHECK(cell(t, 0, 1) == 2);
  CHECK(cell(t, 1, 0) == 2);
  CHECK(cell(t, 1, 1) == 8);
  CHECK(t.row_sums == std::vector<std::int64_t>{10, 10});
  CHECK(t.col_sums == std::vector<std::int64_t>{10, 10});
}

TEST_CASE("contingency: intersect restricts to common nodes") {
  auto ids = numbered_ids(20);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) labels[i] = i < 10 ? 0 : 1;
  Partition p1 = Partition::from_labels(ids, labels);
  Partition p2 = p1;
  p2.assignment.erase("n00");
  p2.assignment.erase("n07");
  p2.assignment.erase("n15");
  ContingencyTable t = contingency_table(p1, p2, NodePolicy::intersect);
  CHECK(t.n == 17);
}

TEST_CASE("contingency: strict mode names the symmetric difference") {
  auto ids = numbered_ids(4);
  Partition p1 = Partition::from_labels(ids, {0, 0, 1, 1});
  Partition p2 = p1;
  p2.assignment.erase("n03");
  p2.assignment.emplace("extra", 1);
  CHECK_THROWS_WITH_AS(contingency_table(p1, p2, NodePolicy::strict),
                       doctest::Contains("2"), std::invalid_argument);
}

TEST_CASE("rand index: identical partitions give 1") {
  auto ids = numbered_ids(12);
  std::vector<int> labels = {0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3};
  Partition p = Partition::from_labels(ids, labels);
  CHECK(rand_index(contingency_table(p, p)) == 1.0);
}

TEST_CASE("rand index: all-singletons vs all-in-one gives 0") {
  auto ids = numbered_ids(10);
  std::vector<int> singles(10), one(10, 0);
  for (int i = 0; i < 10; ++i) singles[i] = i;
  Partition ps = Partition::from_labels(ids, singles);
  Partition po = Partition::from_labels(ids, one);
  CHECK(rand_index(contingency_table(ps, po)) == 0.0);
}

TEST_CASE("rand index: swap scenario is 126/190") {
  auto [p1, p2] = swap_scenario();
  double ri = rand_index(contingency_table(p1, p2));
  CHECK(ri == doctest::Approx(126.0 / 190.0).epsilon(1e-15));
}

TEST_CASE("rand index requires n >= 2") {
  Partition p = Partition::from_labels({"only"}, {0});
  CHECK_THROWS_AS(rand_index(contingency_table(p, p)), std::invalid_argument);
}

TEST_CASE("ARI: identical partitions give exactly 1") {
  auto ids = numbered_ids(15);
  std::vector<int> labels(15);
  for (int i = 0; i < 15; ++i) labels[i] = i % 4;
  Partition p = Partition::from_labels(ids, labels);
  CHECK(adjusted_rand_index(contingency_table(p, p)) == 1.0);
}

TEST_CASE("ARI: swap scenario equals 2920/9000 exactly") {
  auto [p1, p2] = swap_scenario();
  double ari = adjusted_rand_index(contingency_table(p1, p2));
  CHECK(std::fabs(ari - 2920.0 / 9000.0) < 1e-12);
  // rounds to the reported 0.324
  CHECK(std::round(ari * 1000.0) / 1000.0 == doctest::Approx(0.324));
}

TEST_CASE("ARI: null distribution of random 2-block partitions centers at 0") {
  auto ids = numbered_ids(20);
  Rng rng(271828);
  double sum = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<int> a(20), b(20);
    for (int i = 0; i < 20; ++i) a[i] = static_cast<int>(rng.index(2));
    for (int i = 0; i < 20; ++i) b[i] = static_cast<int>(rng.index(2));
    auto one_sided = [](const std::vector<int>& v) {
      auto zeros = std::count(v.begin(), v.end(), 0);
      return zeros == 0 || zeros == 20;
    };
    if (one_sided(a) || one_sided(b)) {
      --t;  // redraw the astronomically rare single-block labeling
      continue;
    }
    sum += adjusted_rand_index(Partition::from_labels(ids, a),
                               Partition::from_labels(ids, b));
  }
  CHECK(std::fabs(sum / trials) <= 0.05);
}

TEST_CASE("ARI degenerate cases") {
  auto ids = numbered_ids(6);
  Partition one = Partition::from_labels(ids, std::vector<int>(6, 0));
  CHECK(adjusted_rand_index(contingency_table(one, one)) == 1.0);
  std::vector<int> singles = {0, 1, 2, 3, 4, 5};
  Partition s = Partition::from_labels(ids, singles);
  CHECK(adjusted_rand_index(contingency_table(s, s)) == 1.0);
  // all-in-one vs all-singletons: numerator and E both collapse, ARI = 0
  CHECK(adjusted_rand_index(contingency_table(one, s)) == 0.0);
}

TEST_CASE("ARI symmetry and relabeling invariance") {
  Rng rng(314);
  auto ids = numbered_ids(18);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> a(18), b(18);
    for (auto& x : a) x = static_cast<int>(rng.index(3));
    for (auto& x : b) x = static_cast<int>(rng.index(4));
    Partition pa = Partition::from_labels(ids, a);
    Partition pb = Partition::from_labels(ids, b);
    double forward = adjusted_rand_index(pa, pb);
    double backward = adjusted_rand_index(pb, pa);
    CHECK(forward == doctest::Approx(backward).epsilon(1e-14));
    // relabel pb's communities
    std::vector<int> relabeled(b);
    for (auto& x : relabeled) x = (x + 7) % 4 + 10;
    Partition pc = Partition::from_labels(ids, relabeled);
    CHECK(adjusted_rand_index(pa, pc) ==
          doctest::Approx(forward).epsilon(1e-14));
    CHECK(rand_index(contingency_table(pa, pb)) ==
          doctest::Approx(rand_index(contingency_table(pb, pa)))
              .epsilon(1e-14));
  }
}

TEST_CASE("ARI is 1 only for identical partitions") {
  auto ids = numbered_ids(12);
  std::vector<int> a = {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2};
  std::vector<int> b(a);
  b[0] = 1;
  Partition pa = Partition::from_labels(ids, a);
  Partition pb = Partition::from_labels(ids, b);
  CHECK(adjusted_rand_index(pa, pa) == 1.0);
  CHECK(adjusted_rand_index(pa, pb) < 1.0);
}

TEST_CASE("month_over_month_ari: constant series is all 1") {
  auto ids = numbered_ids(16);
  std::vector<int> labels(16);
  for (int i = 0; i < 16; ++i) labels[i] = i / 4;
  Partition p = Partition::from_labels(ids, labels);
  auto series = month_over_month_ari({p, p, p, p});
  REQUIRE(series.size() == 3);
  for (const auto& point : series) {
    REQUIRE(point.has_value());
    CHECK(point->ari == 1.0);
    CHECK(point->common_nodes == 16);
  }
}

TEST_CASE("month_over_month_ari: swap scenario as consecutive months") {
  auto [p1, p2] = swap_scenario();
  auto series = month_over_month_ari({p1, p2});
  REQUIRE(series.size() == 1);
  REQUIRE(series[0].has_value());
  CHECK(series[0]->ari == doctest::Approx(2920.0 / 9000.0).epsilon(1e-12));
}

TEST_CASE("month_over_month_ari: planted churn dips then recovers") {
  auto ids = numbered_ids(40);
  std::vector<int> stable(40), churned(40);
  for (int i = 0; i < 40; ++i) stable[i] = i / 10;
  churned = stable;
  // shuffle 8 of 40 members across communities in month 2
  churned[0] = 1;
  churned[1] = 2;
  churned[10] = 3;
  churned[11] = 0;
  churned[20] = 0;
  churned[21] = 3;
  churned[30] = 2;
  churned[31] = 1;
  Partition m1 = Partition::from_labels(ids, stable);
  Partition m2 = Partition::from_labels(ids, churned);
  auto series = month_over_month_ari({m1, m2, m2});
  REQUIRE(series.size() == 2);
  REQUIRE(series[0].has_value());
  REQUIRE(series[1].has_value());
  CHECK(series[0]->ari < 0.8);   // dip when membership churns
  CHECK(series[1]->ari == 1.0);  // new structure stays in place
}

TEST_CASE("month_over_month_ari: disjoint node sets record a missing value") {
  Partition p1 = Partition::from_labels({"a", "b"}, {0, 1});
  Partition p2 = Partition::from_labels({"c", "d"}, {0, 1});
  auto series = month_over_month_ari({p1, p2});
  REQUIRE(series.size() == 1);
  CHECK_FALSE(series[0].has_value());
}

TEST_CASE("month_over_month_ari needs at least two months") {
  Partition p = Partition::from_labels({"a", "b"}, {0, 1});
  CHECK_THROWS_AS(month_over_month_ari({p}), std::invalid_argument);
}

TEST_CASE("ARI stays exact at a million nodes") {
  // pair sums here overflow 64-bit products; the 128-bit accumulation must
  // keep identical partitions at exactly 1
  const int n = 1'000'000;
  Partition a, b;
  for (int i = 0; i < n; ++i) {
    std::string id = "u" + std::to_string(i);
    int block = i < n / 2 ? 0 : 1;
    a.assignment.emplace(std::move(id), block);
  }
  a.community_count = 2;
  b = a;
  CHECK(adjusted_rand_index(contingency_table(a, b)) == 1.0);
  // flip a handful of memberships: still well inside (0, 1) and symmetric
  for (int i = 0; i < 100; ++i)
    b.assignment["u" + std::to_string(i)] = 1;
  double forward = adjusted_rand_index(contingency_table(a, b));
  double backward = adjusted_rand_index(contingency_table(b, a));
  CHECK(forward == backward);
  CHECK(forward > 0.99);
  CHECK(forward < 1.0);
}
