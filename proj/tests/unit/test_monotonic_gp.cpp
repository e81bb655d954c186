#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles/linalg.hpp"
#include "fmb/error.hpp"
#include "fmb/monotonic_gp.hpp"

using namespace fmb;

namespace {

KernelParams params(double eta, std::vector<double> rho, double sigma) {
  KernelParams p;
  p.eta = eta;
  p.rho = Eigen::Map<Eigen::VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size()));
  p.sigma = sigma;
  return p;
}

Eigen::MatrixXd grid_1d(int n, double lo, double hi) {
  Eigen::MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = lo + (hi - lo) * i / (n - 1);
  return x;
}

VirtualPoints points_1d(const Eigen::MatrixXd& at, int sign) {
  VirtualPoints v;
  v.x = at;
  v.dims.assign(static_cast<std::size_t>(at.rows()), 0);
  v.signs = {sign};
  return v;
}

int slope_violations(const Eigen::VectorXd& mean, int expected_sign) {
  int count = 0;
  for (Eigen::Index i = 1; i < mean.size(); ++i)
    if ((mean[i] - mean[i - 1]) * expected_sign < 0) ++count;
  return count;
}

}  // namespace

TEST(NormalCdf, ValuesAndTailContinuity) {
  EXPECT_DOUBLE_EQ(std::exp(log_normal_cdf(0.0)), 0.5);
  EXPECT_NEAR(normal_pdf_cdf_ratio(0.0), 2.0 / std::sqrt(2 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(log_normal_cdf(-30.0 + 1e-9), log_normal_cdf(-30.0 - 1e-9), 1e-6);
  EXPECT_NEAR(normal_pdf_cdf_ratio(-30.0 + 1e-9), normal_pdf_cdf_ratio(-30.0 - 1e-9), 1e-6);
  // Far tail: ratio approaches -z, log cdf approaches the Gaussian log tail.
  EXPECT_NEAR(normal_pdf_cdf_ratio(-1e4) / 1e4, 1.0, 1e-7);
  EXPECT_TRUE(std::isfinite(log_normal_cdf(-1e6)));
  EXPECT_NEAR(normal_pdf_cdf_ratio(8.0), 0.0, 1e-14);
}

TEST(VirtualPoints, Placement) {
  Eigen::VectorXd lo(3), hi(3);
  lo << -1, -2, 0;
  hi << 1, 2, 0.5;
  EXPECT_EQ(place_virtual_points(lo, hi, 0, {-1, -1, -1}).size(), 0);
  const auto v = place_virtual_points(lo, hi, 6, {-1, -1, -1});
  ASSERT_EQ(v.size(), 6);
  std::vector<int> per_dim(3, 0);
  for (int d : v.dims) ++per_dim[static_cast<std::size_t>(d)];
  EXPECT_EQ(per_dim, (std::vector<int>{2, 2, 2}));
  const auto big = place_virtual_points(lo, hi, 100, {1, -1, 1});
  for (Eigen::Index i = 0; i < big.size(); ++i)
    for (int d = 0; d < 3; ++d) {
      EXPECT_GE(big.x(i, d), lo[d]);
      EXPECT_LE(big.x(i, d), hi[d]);
    }
  EXPECT_THROW(place_virtual_points(lo, hi, 3, {1, 0, 1}), Error);
  EXPECT_THROW(place_virtual_points(lo, hi, 3, {1, 1}), Error);
  EXPECT_THROW(place_virtual_points(lo, hi, -1, {1, 1, 1}), Error);
}

TEST(MonotonicGP, NoVirtualPointsReducesToRegularGP) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2, 2), lr(std::log(0.3), std::log(3.0));
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 3, n = 3 + trial % 15;
    Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(n, d, [&] { return u(rng); });
    Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
    KernelParams p;
    p.eta = std::exp(lr(rng));
    p.rho = Eigen::VectorXd::NullaryExpr(d, [&] { return std::exp(lr(rng)); });
    p.sigma = 0.1 * std::exp(lr(rng));
    VirtualPoints v;
    v.x.resize(0, d);
    v.signs.assign(static_cast<std::size_t>(d), -1);
    const auto mono = MonotonicGPModel::fit(x, y, p, v);
    const GPModel reg(x, y, p);
    EXPECT_NEAR(mono.log_z_ep(), reg.log_marginal_likelihood(), 1e-8);
    const Eigen::MatrixXd xs = Eigen::MatrixXd::NullaryExpr(7, d, [&] { return 1.5 * u(rng); });
    const auto a = mono.predict(xs), b = reg.predict(xs);
    for (int i = 0; i < 7; ++i) {
      EXPECT_NEAR(a.mean[i], b.mean[i], 1e-8);
      EXPECT_NEAR(a.variance[i], b.variance[i], 1e-8);
    }
  }
}

// With one site EP is exact: the site matches the tilted moments of
// N(m0, c0) * Phi(g / nu), and Z = p(y) * Phi(m0 / sqrt(nu^2 + c0)).
TEST(MonotonicGP, SingleSiteMatchesExactTiltedMoments) {
  const Eigen::MatrixXd x = grid_1d(6, 0, 3);
  Eigen::VectorXd y(6);
  y << 0.5, 0.2, 0.3, -0.1, 0.0, -0.4;
  const auto p = params(0.9, {0.8}, 0.15);
  Eigen::MatrixXd xm(1, 1);
  xm << 1.3;
  for (double nu : {1e-6, 0.3}) {
    for (int sign : {1, -1}) {
      EpConfig cfg;
      cfg.nu = nu;
      const auto model = MonotonicGPModel::fit(x, y, p, points_1d(xm, sign), cfg);
      ASSERT_TRUE(model.converged());

      // Independent conditional moments of g = sign * df(xm)/dx given y.
      oracle::Matrix xr, k(6, std::vector<double>(6));
      for (int i = 0; i < 6; ++i) xr.push_back({x(i, 0)});
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            oracle::se_kernel(xr[static_cast<std::size_t>(i)], xr[static_cast<std::size_t>(j)], 0.9, {0.8}) + (i == j ? 0.15 * 0.15 : 0.0);
      oracle::Matrix rhs(6, std::vector<double>(2));
      for (int i = 0; i < 6; ++i) {
        const double dx = 1.3 - x(i, 0);
        rhs[static_cast<std::size_t>(i)] = {y[i], -sign * oracle::se_kernel({1.3}, xr[static_cast<std::size_t>(i)], 0.9, {0.8}) * dx / 0.64};
      }
      const auto sol = oracle::solve(k, rhs).first;
      double m0 = 0, q = 0;
      for (int i = 0; i < 6; ++i) {
        m0 += rhs[static_cast<std::size_t>(i)][1] * sol[static_cast<std::size_t>(i)][0];
        q += rhs[static_cast<std::size_t>(i)][1] * sol[static_cast<std::size_t>(i)][1];
      }
      const double c0 = 0.81 / 0.64 - q;
      const double s = std::sqrt(nu * nu + c0), z = m0 / s;
      const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi), cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
      const double tilted_mean = m0 + c0 * pdf / (cdf * s);
      const double tilted_var = c0 - c0 * c0 * pdf / (cdf * s * s) * (z + pdf / cdf);

      const auto deriv = model.predict_derivative(xm, 0);
      EXPECT_NEAR(sign * deriv.mean[0], tilted_mean, 1e-6);
      EXPECT_NEAR(deriv.variance[0], tilted_var, 1e-6);
      const double reg = GPModel(x, y, p).log_marginal_likelihood();
      EXPECT_NEAR(model.log_z_ep(), reg + std::log(cdf), 1e-6);
    }
  }
}

TEST(MonotonicGP, IncreasingDataGivesNonNegativeDerivativesAtVirtualPoints) {
  const Eigen::MatrixXd x = grid_1d(15, -2, 2);
  Eigen::VectorXd y(15);
  for (int i = 0; i < 15; ++i) y[i] = std::tanh(2 * x(i, 0)) + 0.05 * x(i, 0);
  const auto p = params(1.0, {0.7}, 0.05);
  const auto model = MonotonicGPModel::fit(x, y, p, points_1d(grid_1d(10, -2.5, 2.5), 1));
  ASSERT_TRUE(model.converged());
  const auto d = model.predict_derivative(model.virtual_points().x, 0);
  for (int i = 0; i < 10; ++i) EXPECT_GE(d.mean[i], 0.0);
}

TEST(MonotonicGP, ConstraintReducesSlopeViolationsAndVariance) {
  // Decreasing trend with an upward wiggle in the middle.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0, 0.03);
  const Eigen::MatrixXd x = grid_1d(25, 0, 5);
  Eigen::VectorXd y(25);
  for (int i = 0; i < 25; ++i) y[i] = 1.0 - 0.18 * x(i, 0) + 0.15 * std::exp(-8 * std::pow(x(i, 0) - 2.5, 2)) + noise(rng);
  const auto p = params(0.8, {0.5}, 0.05);
  const auto virt = points_1d(grid_1d(20, 0, 5), -1);
  const auto mono = MonotonicGPModel::fit(x, y, p, virt);
  ASSERT_TRUE(mono.converged());
  const GPModel reg(x, y, p);
  const Eigen::MatrixXd fine = grid_1d(200, 0, 5);
  const int v_mono = slope_violations(mono.predict(fine).mean, -1);
  const int v_reg = slope_violations(reg.predict(fine).mean, -1);
  EXPECT_GT(v_reg, 0);
  EXPECT_LT(v_mono, v_reg);
  const auto pm = mono.predict(virt.x), pr = reg.predict(virt.x);
  for (int i = 0; i < virt.size(); ++i) EXPECT_LE(pm.variance[i], pr.variance[i] + 1e-10);
}

TEST(MonotonicGP, WideProbitVanishes) {
  const Eigen::MatrixXd x = grid_1d(10, 0, 3);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) y[i] = std::sin(2 * x(i, 0));
  const auto p = params(1.0, {0.6}, 0.1);
  EpConfig cfg;
  cfg.nu = 1e6;
  const auto mono = MonotonicGPModel::fit(x, y, p, points_1d(grid_1d(8, 0, 3), -1), cfg);
  const GPModel reg(x, y, p);
  const Eigen::MatrixXd xs = grid_1d(30, -0.5, 3.5);
  const auto a = mono.predict(xs), b = reg.predict(xs);
  for (int i = 0; i < 30; ++i) {
    EXPECT_NEAR(a.mean[i], b.mean[i], 1e-4);
    EXPECT_NEAR(a.variance[i], b.variance[i], 1e-4);
  }
}

TEST(MonotonicGP, DeterministicAndRestorable) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(30, 2, [&] { return u(rng); });
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) y[i] = 1 - x(i, 0) * x(i, 1) + 0.05 * u(rng);
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(2), hi = Eigen::VectorXd::Ones(2);
  const auto virt = place_virtual_points(lo, hi, 12, {-1, -1});
  const auto p = params(0.7, {0.6, 0.9}, 0.05);
  const auto a = MonotonicGPModel::fit(x, y, p, virt), b = MonotonicGPModel::fit(x, y, p, virt);
  ASSERT_TRUE(a.converged());
  EXPECT_EQ(a.sites().tau, b.sites().tau);
  EXPECT_EQ(a.sites().nu_tilde, b.sites().nu_tilde);
  EXPECT_EQ(a.log_z_ep(), b.log_z_ep());

  const MonotonicGPModel restored(x, y, p, virt, a.config(), a.sites());
  const auto pa = a.predict(x), pr = restored.predict(x);
  EXPECT_EQ(pa.mean, pr.mean);
  EXPECT_EQ(pa.variance, pr.variance);
  EXPECT_EQ(a.log_z_ep(), restored.log_z_ep());
}

TEST(MonotonicGP, UnconvergedPredictionNeedsForce) {
  const Eigen::MatrixXd x = grid_1d(8, 0, 2);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) y[i] = std::cos(3 * x(i, 0));
  EpConfig cfg;
  cfg.max_sweeps = 1;
  const auto model = MonotonicGPModel::fit(x, y, params(1, {0.5}, 0.1), points_1d(grid_1d(6, 0, 2), -1), cfg);
  EXPECT_FALSE(model.converged());
  EXPECT_EQ(model.sites().sweeps, 1);
  try {
    model.predict(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EpNotConverged);
  }
  EXPECT_NO_THROW(model.predict(x, true));
}

TEST(MonotonicGP, RejectsBadConfig) {
  const Eigen::MatrixXd x = grid_1d(4, 0, 1);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  EpConfig cfg;
  cfg.nu = 0;
  EXPECT_THROW(MonotonicGPModel::fit(x, y, params(1, {1}, 0.1), points_1d(x, 1), cfg), Error);
  auto v = points_1d(x, 1);
  v.dims[0] = 3;
  EXPECT_THROW(MonotonicGPModel::fit(x, y, params(1, {1}, 0.1), v), Error);
}

TEST(MonotonicGP, HyperparameterReoptimizationImprovesLogZ) {
  const Eigen::MatrixXd x = grid_1d(12, 0, 3);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) y[i] = 1 - 0.3 * x(i, 0) + 0.03 * std::sin(7 * x(i, 0));
  const auto virt = points_1d(grid_1d(6, 0, 3), -1);
  OptimizerConfig opt;
  opt.restarts = 3;
  const auto res = fit_monotonic_hyperparameters(x, y, virt, {}, opt);
  ASSERT_GE(res.best, 0);
  const auto start = MonotonicGPModel::fit(x, y, res.restarts[0].start, virt);
  EXPECT_GE(res.model.log_z_ep(), start.log_z_ep());
}

TEST(MonotonicGP, NegligibleSitesAreDroppedFromPrediction) {
  const Eigen::MatrixXd x = grid_1d(8, 0, 3);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) y[i] = -0.3 * x(i, 0);
  const auto p = params(0.7, {0.9}, 0.05);
  const auto virt = points_1d(grid_1d(3, 0, 3), -1);
  EpSites tiny;
  tiny.tau = Eigen::VectorXd::Constant(3, 1e-300);
  tiny.nu_tilde = Eigen::VectorXd::Constant(3, 1e-290);  // site mean 1e10
  tiny.converged = true;
  EpSites none = tiny;
  none.tau.setZero();
  none.nu_tilde.setZero();
  const MonotonicGPModel a(x, y, p, virt, {}, tiny), b(x, y, p, virt, {}, none);
  const Eigen::MatrixXd xs = grid_1d(5, -0.5, 3.5);
  const auto pa = a.predict(xs), pb = b.predict(xs);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(pa.mean[i], pb.mean[i]);
    EXPECT_EQ(pa.variance[i], pb.variance[i]);
  }
  EXPECT_EQ(a.log_z_ep(), b.log_z_ep());
}
