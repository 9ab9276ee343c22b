#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gdss/dof.hpp"
#include "gdss/errors.hpp"
#include "gdss/io.hpp"
#include "gdss/simstudy.hpp"
#include "oracles.hpp"

using namespace gdss;

namespace {

PosteriorDraws single_draw(const GroupHierarchy& h, double tau2, const Eigen::VectorXd& lambda2) {
  PosteriorDraws d;
  const Index p = h.num_predictors();
  d.beta = Eigen::MatrixXd::Zero(1, p);
  d.sigma2 = Eigen::VectorXd::Ones(1);
  d.tau2 = Eigen::VectorXd::Constant(1, tau2);
  d.lambda2 = lambda2.transpose();
  for (const auto& lvl : h.levels()) d.delta2.push_back(Eigen::MatrixXd::Ones(1, lvl.num_groups()));
  return d;
}

Eigen::MatrixXd random_matrix(Index r, Index c, RngStream& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("dof_yl") {
  CHECK(dof_yl(Eigen::Vector3d::Zero(), Eigen::Vector3d(5, 10, 15)) == 0.0);
  CHECK(dof_yl(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, 2.0)) == 2.0);
  CHECK(dof_yl(Eigen::Vector3d(0.5, 0, 1), Eigen::Vector3d(5, 10, 15)) == doctest::Approx(18.5));
}

TEST_CASE("dof_pe") {
  GroupDofTable t{Eigen::Vector3d(1.2, 4.4, 0.7)};
  CHECK(dof_pe({}, t) == 0.0);
  CHECK(dof_pe({0, 2}, t) == doctest::Approx(1.9));
  CHECK(dof_pe({0, 1, 2}, t) == doctest::Approx(6.3));
}

TEST_CASE("group_dof_pe closed forms") {
  SUBCASE("identity gram, unit prior") {
    // X'X = I for the two columns of the single group.
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(4, 2);
    X(0, 0) = 1.0;
    X(1, 1) = 1.0;
    const GroupHierarchy h = build_hierarchy(2, {{1, 1}});
    const GroupDofTable t = group_dof_pe(single_draw(h, 1.0, Eigen::Vector2d::Ones()), X, h, selection_partition(h, 0));
    CHECK(t.df[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("shrinkage limits") {
    RngStream rng(41, 0);
    const Eigen::MatrixXd X = random_matrix(20, 5, rng);
    const GroupHierarchy h = build_hierarchy(5, {{1, 1, 1, 2, 2}});
    const GroupPartition part = selection_partition(h, 0);
    const GroupDofTable lo = group_dof_pe(single_draw(h, 1e-12, Eigen::VectorXd::Ones(5)), X, h, part);
    const GroupDofTable hi = group_dof_pe(single_draw(h, 1e12, Eigen::VectorXd::Ones(5)), X, h, part);
    CHECK(lo.df.maxCoeff() < 1e-9);
    CHECK(hi.df[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(hi.df[1] == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("monotone in the prior precision") {
    RngStream rng(42, 0);
    const Eigen::MatrixXd X = random_matrix(10, 4, rng);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::Vector4d v;
      for (int j = 0; j < 4; ++j) v[j] = 0.05 + 3.0 * rng.uniform();
      const double base = group_ridge_dof(X.transpose() * X, v);
      Eigen::Vector4d w = v;
      w[trial % 4] *= 0.5;  // halving a prior variance doubles that precision entry
      CHECK(group_ridge_dof(X.transpose() * X, w) <= base + 1e-12);
      CHECK(base <= 4.0);
      CHECK(base >= 0.0);
    }
  }
  SUBCASE("orthogonal groups reproduce the full-model trace") {
    RngStream rng(43, 0);
    const Eigen::MatrixXd Q = random_matrix(12, 5, rng).householderQr().householderQ() * Eigen::MatrixXd::Identity(12, 5);
    Eigen::MatrixXd X = Q;
    for (int j = 0; j < 5; ++j) X.col(j) *= 0.5 + j;
    // Orthogonality only needs to hold across groups; mix columns within group 1.
    X.col(1) += 0.3 * X.col(0);
    const GroupHierarchy h = build_hierarchy(5, {{1, 1, 2, 2, 3}});
    Eigen::VectorXd lambda2(5);
    lambda2 << 0.4, 1.7, 2.2, 0.3, 5.0;
    const double tau2 = 0.8;
    const GroupDofTable t = group_dof_pe(single_draw(h, tau2, lambda2), X, h, selection_partition(h, 0));
    CHECK(t.df.sum() == doctest::Approx(oracle::full_ridge_trace(X, tau2 * lambda2)).epsilon(1e-8));
  }
  SUBCASE("bounds and thinning") {
    RngStream rng(44, 0);
    const Eigen::MatrixXd X = random_matrix(6, 8, rng);
    const GroupHierarchy h = build_hierarchy(8, {{1, 1, 1, 1, 1, 1, 1, 2}});
    PosteriorDraws d = single_draw(h, 1e8, Eigen::VectorXd::Ones(8));
    const GroupDofTable t = group_dof_pe(d, X, h, selection_partition(h, 0));
    CHECK(t.df[0] <= 6.0 + 1e-8);
    CHECK(t.df[1] <= 1.0 + 1e-8);
    CHECK(t.df.sum() <= 8.0);
    CHECK_THROWS_AS(group_dof_pe(d, X, h, selection_partition(h, 0), 0), UsageError);
  }
}

TEST_CASE("Example 1 fit: partially active group has few effective degrees of freedom") {
  RngStream rng(41, 0);
  SimDataset d = gen_example1(4.0, rng);
  standardize_columns(d.X, d.y);
  SamplerConfig cfg;
  cfg.seed = 41;
  const PosteriorDraws draws = run_chain(d.X, d.y, d.hierarchy, cfg);
  const GroupPartition part = selection_partition(d.hierarchy, 0);
  const GroupDofTable t = group_dof_pe(draws, d.X, d.hierarchy, part);
  // Recorded from this seed: 6.1947.
  CHECK(t.df[4] == doctest::Approx(6.1947).epsilon(0.10));
  CHECK(t.df[4] < 15.0);
  for (Index g = 0; g < 6; ++g) CHECK(t.df[g] <= part.sizes()[g]);
  const GroupDofTable thin = group_dof_pe(draws, d.X, d.hierarchy, part, 10);
  CHECK(thin.df[4] == doctest::Approx(t.df[4]).epsilon(0.05));
}
