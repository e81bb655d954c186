#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fmb/gp.hpp"

namespace fmb {

/// Locations where a derivative sign is imposed. Point i constrains
/// d f / d x_{dims[i]}; `signs[d]` is +1 (increasing) or -1 (decreasing) for
/// input dimension d.
struct VirtualPoints {
  Eigen::MatrixXd x;
  std::vector<int> dims;
  std::vector<int> signs;

  Eigen::Index size() const { return x.rows(); }
  void validate(Eigen::Index input_dims) const;
};

/// M Sobol points over the box [lo, hi], dimensions assigned round-robin.
VirtualPoints place_virtual_points(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int m, std::vector<int> signs);

struct EpConfig {
  double nu = 1e-6;  // probit sharpness
  double damping = 0.8;
  int max_sweeps = 200;
  double tolerance = 1e-6;
};

/// Site approximations in natural parameters: tau = 1 / site variance,
/// nu_tilde = site mean / site variance. A site with tau = 0 is inactive, and
/// prediction also drops sites whose tau is negligible against the prior
/// derivative precision.
struct EpSites {
  Eigen::VectorXd tau;
  Eigen::VectorXd nu_tilde;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> trace;  // largest parameter change per sweep

  Eigen::VectorXd means() const;      // NaN for inactive sites
  Eigen::VectorXd variances() const;  // +inf for inactive sites
};

/// GP with probit derivative-sign likelihoods at virtual points, posterior
/// approximated by expectation propagation. Immutable once built.
class MonotonicGPModel {
 public:
  /// Runs EP. Throws EpDivergence (with the per-sweep trace) if site
  /// parameters become non-finite. Non-convergence is recorded, not thrown.
  static MonotonicGPModel fit(Eigen::MatrixXd x, Eigen::VectorXd y, KernelParams params, VirtualPoints virt,
                              const EpConfig& config = {});
  /// Rebuilds a model from stored sites without rerunning EP.
  MonotonicGPModel(Eigen::MatrixXd x, Eigen::VectorXd y, KernelParams params, VirtualPoints virt, EpConfig config,
                   EpSites sites);

  const KernelParams& params() const { return params_; }
  const VirtualPoints& virtual_points() const { return virt_; }
  const EpSites& sites() const { return sites_; }
  const EpConfig& config() const { return config_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  bool converged() const { return sites_.converged; }

  /// EP approximation to the log marginal likelihood, including the
  /// -N/2 log 2 pi constant so that M = 0 gives the regular GP value.
  double log_z_ep() const { return log_z_; }

  /// Posterior of f. Throws EpNotConverged on an unconverged model unless
  /// `force` is set.
  Prediction predict(const Eigen::MatrixXd& xs, bool force = false) const;
  /// Posterior of d f / d x_dim.
  Prediction predict_derivative(const Eigen::MatrixXd& xs, int dim, bool force = false) const;

 private:
  MonotonicGPModel() = default;
  void prepare();  // factorize the joint system over active sites
  Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& xs, int dim) const;
  Prediction predict_impl(const Eigen::MatrixXd& xs, int dim, bool force) const;

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  KernelParams params_;
  VirtualPoints virt_;
  EpConfig config_;
  EpSites sites_;
  double log_z_ = 0.0;

  std::vector<Eigen::Index> active_;
  JitteredCholesky chol_;
  Eigen::VectorXd alpha_;
};

/// Joint prior covariance of [f(X); s_i d f(Xm_i) / d x_{d_i}].
Eigen::MatrixXd joint_covariance(const Eigen::MatrixXd& x, const VirtualPoints& virt, const KernelParams& p);

/// Re-selects hyperparameters by maximizing log Z_EP with the same multi-start
/// search as the regular fit.
struct MonotonicFitResult {
  MonotonicGPModel model;
  std::vector<RestartResult> restarts;
  int best = -1;
};
MonotonicFitResult fit_monotonic_hyperparameters(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                 const VirtualPoints& virt, const EpConfig& ep,
                                                 const OptimizerConfig& opt = {});

/// log Phi(z) and the ratio phi(z) / Phi(z), accurate far into the lower tail.
double log_normal_cdf(double z);
double normal_pdf_cdf_ratio(double z);

}  // namespace fmb
