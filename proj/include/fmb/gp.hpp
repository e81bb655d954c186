#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace fmb {

/// Squared-exponential kernel eta^2 exp(-1/2 sum_d (x_d - x'_d)^2 / rho_d^2)
/// with separate i.i.d. observation noise sigma^2.
struct KernelParams {
  double eta = 1.0;
  Eigen::VectorXd rho;
  double sigma = 0.1;

  void validate(Eigen::Index dims) const;
};

double kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, const KernelParams& p);
/// Cov(df(x)/dx_g, f(x')).
double kernel_grad_first(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, int g,
                         const KernelParams& p);
/// Cov(f(x), df(x')/dx'_h).
double kernel_grad_second(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, int h,
                          const KernelParams& p);
/// Cov(df(x)/dx_g, df(x')/dx'_h).
double kernel_grad_both(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, int g, int h,
                        const KernelParams& p);

/// Rows of `a` against rows of `b`.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p);

/// Cholesky factor of a symmetric matrix, retrying with diagonal jitter
/// 1e-10, 1e-9, ..., 1e-6 before throwing NumericalFailure.
struct JitteredCholesky {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};
JitteredCholesky robust_cholesky(const Eigen::MatrixXd& a);

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // latent f, clamped at 0
};

/// Zero-mean GP conditioned on (X, y) with fixed hyperparameters.
class GPModel {
 public:
  GPModel() = default;
  GPModel(Eigen::MatrixXd x, Eigen::VectorXd y, KernelParams params);

  const KernelParams& params() const { return params_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  double jitter() const { return chol_.jitter; }

  double log_marginal_likelihood() const;
  Prediction predict(const Eigen::MatrixXd& xs) const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  KernelParams params_;
  JitteredCholesky chol_;
  Eigen::VectorXd alpha_;
};

/// Multi-start Nelder-Mead over log hyperparameters within box bounds.
struct OptimizerConfig {
  int restarts = 10;
  std::uint64_t seed = 0;
  int max_iterations = 400;
  double tolerance = 1e-7;  // simplex size
  double eta_min = 1e-3, eta_max = 10.0;
  double rho_min = 1e-2, rho_max = 1e2;
  double sigma_min = 1e-6, sigma_max = 1.0;
};

struct RestartResult {
  KernelParams start;
  KernelParams result;
  double log_ml = 0.0;
  bool ok = false;
  int iterations = 0;
};

struct FitResult {
  GPModel model;
  std::vector<RestartResult> restarts;
  int best = -1;
};

/// Objective to maximize over hyperparameters. Throwing fmb::Error marks the
/// point as infeasible.
using HyperObjective = std::function<double(const KernelParams&)>;

/// Runs the multi-start search for `dims` input dimensions. Restart 0 starts
/// from eta = y_scale, rho = 1, sigma = y_scale / 10 (clamped to the bounds).
std::vector<RestartResult> multistart_optimize(Eigen::Index dims, double y_scale, const OptimizerConfig& config,
                                               const HyperObjective& objective);
/// Index of the best successful restart, lowest index on ties; -1 if none.
int best_restart(const std::vector<RestartResult>& restarts);

/// Restart 0 starts from eta = sd(y), rho = 1, sigma = sd(y)/10 (clamped to
/// the bounds); the others from log-uniform draws. The highest log marginal
/// likelihood wins, ties going to the lower restart index.
FitResult fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const OptimizerConfig& config = {});

}  // namespace fmb
