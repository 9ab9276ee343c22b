#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "gdss/nng.hpp"
#include "gdss/random.hpp"
#include "gdss/simstudy.hpp"
#include "oracles.hpp"

using namespace gdss;

namespace {

Eigen::MatrixXd random_matrix(Index r, Index c, RngStream& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Eigen::VectorXd random_vector(Index n, RngStream& rng) { return random_matrix(n, 1, rng).col(0); }

}  // namespace

TEST_CASE("smoothed target and group design") {
  RngStream rng(31, 0);
  const Eigen::MatrixXd X = random_matrix(5, 3, rng);
  const Eigen::VectorXd b = random_vector(3, rng);
  Eigen::VectorXd brute = Eigen::VectorXd::Zero(5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) brute[i] += X(i, j) * b[j];
  CHECK((smoothed_target(X, b) - brute).norm() < 1e-14);
  CHECK(smoothed_target(Eigen::MatrixXd::Identity(3, 3), b) == b);
  CHECK(smoothed_target(X, Eigen::Vector3d::Zero()).isZero());

  const GroupHierarchy all = build_hierarchy(3, {{1, 1, 1}});
  const Eigen::MatrixXd Z1 = group_design(X, b, selection_partition(all, 0));
  REQUIRE(Z1.cols() == 1);
  CHECK((Z1.col(0) - X * b).norm() < 1e-14);

  const Eigen::MatrixXd Zs = group_design(X, b, singleton_partition(3));
  for (int j = 0; j < 3; ++j) CHECK((Zs.col(j) - X.col(j) * b[j]).norm() < 1e-14);

  SimDataset d = gen_example1(4.0, rng);
  const Eigen::VectorXd bb = random_vector(60, rng);
  const GroupPartition part = selection_partition(d.hierarchy, 0);
  const Eigen::MatrixXd Z = group_design(d.X, bb, part);
  REQUIRE(Z.cols() == 6);
  Index start = 0;
  const Index sizes[] = {5, 5, 10, 10, 15, 15};
  for (Index g = 0; g < 6; ++g) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(50);
    for (Index j = start; j < start + sizes[g]; ++j) col += d.X.col(j) * bb[j];
    start += sizes[g];
    CHECK(Z.col(g).norm() == doctest::Approx(col.norm()).epsilon(1e-12));
  }
}

TEST_CASE("nng_solve") {
  RngStream rng(32, 0);
  SUBCASE("above kappa_max") {
    const Eigen::MatrixXd Z = random_matrix(20, 3, rng);
    const Eigen::VectorXd y = random_vector(20, rng);
    const Eigen::Vector3d s(1, 2, 3);
    const double kmax = nng_kappa_max(Z, y, s);
    CHECK(nng_solve(Z, y, s, kmax).isZero());
    CHECK(nng_solve(Z, y, s, 2 * kmax).isZero());
    CHECK(nng_solve(Z, y, s, 0.99 * kmax).maxCoeff() > 0.0);
  }
  SUBCASE("single group at kappa zero") {
    const Eigen::MatrixXd Z = random_matrix(15, 1, rng);
    const Eigen::VectorXd y = 0.7 * Z.col(0) + 0.1 * random_vector(15, rng);
    const Eigen::VectorXd s = Eigen::VectorXd::Ones(1);
    const double ols = Z.col(0).dot(y) / Z.col(0).squaredNorm();
    CHECK(nng_solve(Z, y, s, 0.0)[0] == doctest::Approx(ols).epsilon(1e-12));
    CHECK(nng_solve(Z, -y, s, 0.0)[0] == 0.0);
  }
  SUBCASE("three groups against enumeration") {
    const Eigen::MatrixXd Z = random_matrix(12, 3, rng);
    const Eigen::VectorXd y = Z * Eigen::Vector3d(0.8, 0.3, -0.4) + 0.3 * random_vector(12, rng);
    const Eigen::Vector3d s(2, 1, 3);
    const Eigen::VectorXd d = nng_solve(Z, y, s, 0.37);
    const Eigen::VectorXd oracle_d = oracle::brute_force_nng(Z, y, s, 0.37);
    CHECK((d - oracle_d).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(nng_kkt_violation(Z, y, s, 0.37, d) < 1e-8 * y.squaredNorm());
  }
}

TEST_CASE("nng_path") {
  RngStream rng(33, 0);
  const Eigen::MatrixXd Z = random_matrix(30, 4, rng);
  const Eigen::VectorXd y = Z * Eigen::Vector4d(1.0, 0.5, 0.2, 0.0) + 0.5 * random_vector(30, rng);
  const Eigen::Vector4d s(5, 5, 10, 15);
  const NngPath path = nng_path(Z, y, s);
  REQUIRE(path.candidates.size() >= 2);
  CHECK(path.candidates.front().support.empty());
  CHECK(path.candidates.back().kappa == 0.0);
  std::set<std::vector<Index>> seen;
  for (std::size_t i = 0; i < path.candidates.size(); ++i) {
    const NngCandidate& c = path.candidates[i];
    CHECK(c.d.minCoeff() >= 0.0);
    CHECK(nng_kkt_violation(Z, y, s, c.kappa, c.d) < 1e-8 * y.squaredNorm());
    CHECK(seen.insert(c.support).second);
    if (i > 0) {
      CHECK(c.kappa < path.candidates[i - 1].kappa);
      CHECK(c.sse <= path.candidates[i - 1].sse + 1e-12);
      CHECK(c.support != path.candidates[i - 1].support);
    }
  }
  CHECK(path.candidates.back().support.size() >= 3);

  // Joint scaling of (Z, y) by c scales kappa_max by c^2 and leaves supports unchanged.
  const double c = 3.0;
  const NngPath scaled = nng_path(c * Z, c * y, s);
  REQUIRE(scaled.candidates.size() == path.candidates.size());
  for (std::size_t i = 0; i < path.candidates.size(); ++i) {
    CHECK(scaled.candidates[i].support == path.candidates[i].support);
    CHECK(scaled.candidates[i].kappa == doctest::Approx(c * c * path.candidates[i].kappa).epsilon(1e-9));
  }

  NngOptions bad;
  bad.grid_size = 1;
  CHECK_THROWS(nng_path(Z, y, s, bad));
}

TEST_CASE("zero columns are forced inactive") {
  RngStream rng(34, 0);
  Eigen::MatrixXd Z = random_matrix(20, 3, rng);
  Z.col(1).setZero();
  const Eigen::VectorXd y = Z.col(0) + Z.col(2);
  const NngPath path = nng_path(Z, y, Eigen::Vector3d::Ones());
  CHECK(path.forced_inactive == std::vector<Index>{1});
  for (const auto& c : path.candidates) CHECK(c.d[1] == 0.0);
}

TEST_CASE("reconstruct_beta and group_dss") {
  const GroupHierarchy h = build_hierarchy(4, {{1, 1, 2, 0}});
  const GroupPartition part = selection_partition(h, 0);
  const Eigen::Vector4d b(1.0, -2.0, 3.0, 4.0);
  CHECK(reconstruct_beta(Eigen::Vector3d::Ones(), b, part) == b);
  CHECK(reconstruct_beta(Eigen::Vector3d::Zero(), b, part).isZero());
  CHECK(reconstruct_beta(Eigen::Vector3d(0.5, 0.0, 2.0), b, part) == Eigen::Vector4d(0.5, -1.0, 0.0, 8.0));

  RngStream rng(35, 0);
  SimDataset d = gen_example1(4.0, rng);
  const Eigen::VectorXd bb = d.beta + 0.05 * random_vector(60, rng);
  const GroupPartition p6 = selection_partition(d.hierarchy, 0);
  const NngPath path = group_dss(d.X, bb, p6);
  for (const auto& c : path.candidates) {
    REQUIRE(c.beta_kappa.size() == 60);
    CHECK((d.X * c.beta_kappa - path.Z * c.d).norm() < 1e-10 * (1.0 + path.y_bar.norm()));
  }
  CHECK((path.candidates.back().beta_kappa - bb).norm() < 1e-6 * bb.norm());
}
