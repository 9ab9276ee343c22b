#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gdss/errors.hpp"
#include "gdss/groups.hpp"
#include "gdss/random.hpp"

using namespace gdss;

namespace {

std::vector<long> example1_labels() {
  std::vector<long> labels;
  const int sizes[] = {5, 5, 10, 10, 15, 15};
  for (int g = 0; g < 6; ++g)
    for (int m = 0; m < sizes[g]; ++m) labels.push_back(g + 1);
  return labels;
}

ShrinkageScales random_scales(const GroupHierarchy& h, RngStream& rng) {
  ShrinkageScales s = ShrinkageScales::unit(h);
  s.tau2 = 0.5 + rng.uniform();
  for (Index j = 0; j < s.lambda2.size(); ++j) s.lambda2[j] = 0.1 + 3 * rng.uniform();
  for (auto& d : s.delta2)
    for (Index g = 0; g < d.size(); ++g) d[g] = 0.1 + 3 * rng.uniform();
  return s;
}

}  // namespace

TEST_CASE("build_hierarchy") {
  const GroupHierarchy a = build_hierarchy(4, {{1, 1, 2, 2}});
  REQUIRE(a.num_levels() == 1);
  CHECK(a.level(0).num_groups() == 2);
  CHECK(a.level(0).group_size(0) == 2);
  CHECK(a.level(0).group_size(1) == 2);

  const GroupHierarchy b = build_hierarchy(3, {{0, 0, 0}});
  CHECK(b.level(0).num_groups() == 0);
  const ShrinkageScales s = ShrinkageScales::unit(b);
  for (Index j = 0; j < 3; ++j) CHECK(omega(b, s, 0, j) == 1.0);

  const GroupHierarchy c = build_hierarchy(60, {example1_labels()});
  REQUIRE(c.level(0).num_groups() == 6);
  const Index expected[] = {5, 5, 10, 10, 15, 15};
  for (Index g = 0; g < 6; ++g) CHECK(c.level(0).group_size(g) == expected[g]);

  // Arbitrary labels are renumbered; non-contiguous groups are allowed.
  const GroupHierarchy d = build_hierarchy(5, {{7, 3, 7, 0, 3}});
  CHECK(d.level(0).num_groups() == 2);
  CHECK(d.level(0).members[0] == std::vector<Index>{0, 2});
  CHECK(d.group_of(0, 3) == kUngrouped);

  CHECK_THROWS_AS(build_hierarchy(4, {{1, 1, 2}}), DataError);
  CHECK_THROWS_AS(build_hierarchy(2, {{1, -1}}), DataError);
}

TEST_CASE("hierarchy validation") {
  GroupLevel overlap;
  overlap.group_of = {0, 0, 1};
  overlap.members = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(GroupHierarchy(3, {overlap}), DataError);

  GroupLevel empty;
  empty.group_of = {0, 0};
  empty.members = {{0, 1}, {}};
  CHECK_THROWS_AS(GroupHierarchy(2, {empty}), DataError);

  // Overlap across levels is fine.
  const GroupHierarchy h = build_hierarchy(4, {{1, 1, 2, 2}, {1, 2, 2, 0}});
  CHECK(h.num_levels() == 2);
}

TEST_CASE("omega and scale diagonals") {
  const GroupHierarchy h = build_hierarchy(60, {example1_labels()});
  ShrinkageScales s = ShrinkageScales::unit(h);
  s.delta2[0] << 1, 2, 3, 4, 5, 6;
  CHECK(omega(h, s, 0, 6) == 2.0);  // predictor 7
  CHECK(omega(h, s, 0, 59) == 6.0);

  CHECK(scale_diag(h, ShrinkageScales::unit(h)).isOnes());

  const GroupHierarchy flat(3, {});
  ShrinkageScales f = ShrinkageScales::unit(flat);
  f.tau2 = 2.0;
  f.lambda2 << 1, 2, 3;
  CHECK(scale_diag(flat, f).isApprox(Eigen::Vector3d(2, 4, 6)));

  RngStream rng(5, 0);
  const GroupHierarchy h2 = build_hierarchy(6, {{1, 1, 2, 2, 0, 3}, {1, 0, 1, 2, 2, 2}});
  const ShrinkageScales r = random_scales(h2, rng);
  const Eigen::VectorXd diag = scale_diag(h2, r);
  for (Index j = 0; j < 6; ++j) {
    double brute = r.tau2 * r.lambda2[j];
    for (Index k = 0; k < 2; ++k) {
      const int g = h2.group_of(k, j);
      if (g != kUngrouped) brute *= r.delta2[static_cast<std::size_t>(k)][g];
    }
    CHECK(diag[j] == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("scale_diag_excluding") {
  const GroupHierarchy one = build_hierarchy(4, {{1, 1, 2, 2}});
  ShrinkageScales s = ShrinkageScales::unit(one);
  s.delta2[0] << 3, 5;
  CHECK(scale_diag_excluding(one, s, 0).isOnes());

  RngStream rng(6, 0);
  const GroupHierarchy two = build_hierarchy(5, {{1, 1, 2, 2, 0}, {1, 2, 2, 0, 1}});
  const ShrinkageScales t = random_scales(two, rng);
  const Eigen::VectorXd ex0 = scale_diag_excluding(two, t, 0);
  for (Index j = 0; j < 5; ++j) CHECK(ex0[j] == doctest::Approx(omega(two, t, 1, j)));

  const GroupHierarchy three = build_hierarchy(6, {{1, 1, 2, 2, 3, 3}, {1, 1, 1, 2, 2, 0}, {0, 1, 1, 1, 2, 2}});
  const ShrinkageScales u = random_scales(three, rng);
  for (Index k = 0; k < 3; ++k) {
    const Eigen::VectorXd ex = scale_diag_excluding(three, u, k);
    const Eigen::VectorXd full = scale_diag(three, u);
    for (Index j = 0; j < 6; ++j) {
      double brute = 1.0;
      for (Index i = 0; i < 3; ++i)
        if (i != k) brute *= omega(three, u, i, j);
      CHECK(ex[j] == doctest::Approx(brute).epsilon(1e-14));
      CHECK(ex[j] * omega(three, u, k, j) * u.tau2 * u.lambda2[j] == doctest::Approx(full[j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("selection partitions") {
  const GroupHierarchy h = build_hierarchy(5, {{2, 0, 2, 1, 0}});
  const GroupPartition p = selection_partition(h, 0);
  CHECK(p.num_declared == 2);
  REQUIRE(p.num_groups() == 4);
  CHECK(p.members[0] == std::vector<Index>{0, 2});
  CHECK(p.members[2] == std::vector<Index>{1});
  CHECK(p.members[3] == std::vector<Index>{4});
  CHECK(p.sizes().isApprox(Eigen::Vector4d(2, 1, 1, 1)));
  CHECK_THROWS_AS(selection_partition(h, 1), UsageError);
  CHECK(singleton_partition(3).num_groups() == 3);
}
