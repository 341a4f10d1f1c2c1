#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <tuple>

#include "mpsfd/harness.hpp"
#include "mpsfd/random.hpp"

using namespace mpsfd;

TEST(Manufactured, ValuesAtOrigin) {
  for (int dim : {2, 3}) {
    const ManufacturedSolution g(dim, BcMode::AllDirichlet, 1.0);
    EXPECT_EQ(g.value({0, 0, 0}), 0.0);
    EXPECT_NEAR(g.laplacian({0, 0, 0}), 0.0, 1e-15);
  }
}

TEST(Manufactured, NormalizationFrozen) {
  // Frozen from tests/oracles/compute_oracles.py.
  EXPECT_NEAR(ManufacturedSolution::standard_normalization(2), 0.9186831230274549, 1e-12);
  EXPECT_NEAR(ManufacturedSolution::standard_normalization(3), 2.7939109573067338, 1e-12);
  const auto g = ManufacturedSolution::standard(2, BcMode::AllDirichlet);
  const double c = g.normalization();
  EXPECT_NEAR(sampled_range(2, Domain::unit_box_with_cut(2), 400) / c, 1.0, 1e-14);
}

TEST(Manufactured, DerivativesMatchFiniteDifferences) {
  Rng rng(4);
  for (int dim : {2, 3}) {
    const ManufacturedSolution g(dim, BcMode::AllDirichlet, 1.3);
    const double e = 1e-4;
    for (int t = 0; t < 20; ++t) {
      Point x{rng.uniform(), rng.uniform(), dim == 3 ? rng.uniform() : 0.0};
      double lap = 0.0;
      const auto grad = g.gradient(x);
      for (int a = 0; a < dim; ++a) {
        Point p = x, m = x;
        p[a] += e;
        m[a] -= e;
        lap += (g.value(p) - 2 * g.value(x) + g.value(m)) / (e * e);
        EXPECT_NEAR(grad[a], (g.value(p) - g.value(m)) / (2 * e), 1e-7);
      }
      EXPECT_NEAR(g.laplacian(x), lap, 1e-5);
      EXPECT_EQ(g.source(x), -g.laplacian(x));
    }
  }
}

TEST(ApplyBc, BottomFaceWithoutCorners) {
  const auto domain = Domain::unit_box_with_cut(2);
  const auto cloud = generate(domain, 0.1, 0.025, 2);
  EXPECT_EQ(apply_bc(cloud, domain, BcMode::AllDirichlet), cloud);
  const auto mixed = apply_bc(cloud, domain, BcMode::MixedNeumannBottom);
  ASSERT_GT(mixed.count(Role::Neumann), 0u);
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    const auto& x = mixed.point(i);
    if (mixed.role(i) == Role::Neumann) {
      EXPECT_NEAR(x[1], 0.0, kBoundaryTolerance);
      EXPECT_GT(x[0], 0.0);
      EXPECT_LT(x[0], 1.0);
      EXPECT_EQ(mixed.normal(i), (Point{0, -1, 0}));
    } else {
      EXPECT_EQ(mixed.role(i), cloud.role(i));
    }
  }
  EXPECT_EQ(mixed.count(Role::Neumann) + mixed.count(Role::Dirichlet), cloud.count(Role::Dirichlet));
}

TEST(BcNames, RoundTrip) {
  for (auto b : {BcMode::AllDirichlet, BcMode::MixedNeumannBottom}) EXPECT_EQ(parse_bc(to_string(b)), b);
  EXPECT_THROW(parse_bc("robin"), std::invalid_argument);
}

TEST(Convergence, SmallRunAndCsv) {
  ConvergenceConfig cfg;
  cfg.hs = {0.2, 0.1};
  cfg.seeds = 2;
  cfg.bcs = {BcMode::AllDirichlet, BcMode::MixedNeumannBottom};
  const auto recs = run_convergence(cfg);
  ASSERT_EQ(recs.size(), 2u * 2u * 2u * 2u);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i];
    EXPECT_TRUE(std::tie(a.h, a.seed, a.method, a.bc) < std::tie(b.h, b.seed, b.method, b.bc));
  }
  for (const auto& r : recs) {
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.err_max, 0.0);
    EXPECT_LT(r.err_max, 0.1);
  }
  // Refinement lowers the Dirichlet error.
  EXPECT_GT(fit_slope(recs, Method::Mps, BcMode::AllDirichlet).slope, 1.0);
  std::stringstream ss;
  write_convergence_csv(ss, recs);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "h,seed,method,bc,err_max,setup_s,solve_s,nnz");
  int lines = 0;
  for (std::string line; std::getline(ss, line);) ++lines;
  EXPECT_EQ(lines, static_cast<int>(recs.size()));
}

TEST(SlopeFit, SyntheticPowerLaw) {
  std::vector<ConvergenceRecord> recs;
  for (double h : {0.4, 0.2, 0.1, 0.05})
    for (std::uint64_t s = 1; s <= 3; ++s) {
      ConvergenceRecord r;
      r.h = h;
      r.seed = s;
      r.method = Method::Mps;
      r.err_max = 3.0 * h * h;
      recs.push_back(r);
      r.method = Method::Lsq;
      r.err_max = 6.0 * h * h;
      recs.push_back(r);
    }
  const auto fit = fit_slope(recs, Method::Mps, BcMode::AllDirichlet);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 3.0, 1e-10);
  EXPECT_EQ(fit.hs.size(), 4u);
  EXPECT_NEAR(error_constant_ratio(recs, BcMode::AllDirichlet), 2.0, 1e-12);
}

TEST(CostCsv, Header) {
  std::stringstream ss;
  write_cost_csv(ss, {});
  EXPECT_EQ(ss.str(), "h,n,method,setup_s,solve_s,nnz,mean_candidates\n");
}
