#include "fmb/monotonic_gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fmb/csv.hpp"
#include "fmb/error.hpp"
#include "fmb/sobol.hpp"

namespace fmb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Sites whose precision is this small relative to the prior derivative
// precision leave the posterior unchanged to working accuracy; keeping them
// would put variances near 1/tau (up to overflow) into the joint system.
constexpr double kActiveFloor = 1e-12;

// Covariance between derivative site i and f at row x (or its derivative
// along `dim` when dim >= 0).
double site_cross(const VirtualPoints& v, Eigen::Index i, const Eigen::Ref<const Eigen::VectorXd>& x, int dim,
                  const KernelParams& p) {
  const int d = v.dims[static_cast<std::size_t>(i)];
  const double s = v.signs[static_cast<std::size_t>(d)];
  const Eigen::VectorXd xm = v.x.row(i).transpose();
  return dim < 0 ? s * kernel_grad_first(xm, x, d, p) : s * kernel_grad_both(xm, x, d, dim, p);
}

struct Marginal {
  Eigen::VectorXd m0;  // prior mean of the derivatives given y
  Eigen::MatrixXd c0;  // prior covariance of the derivatives given y
};

Marginal condition_on_data(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const VirtualPoints& v, const KernelParams& p) {
  const Eigen::Index n = x.rows(), m = v.size();
  Eigen::MatrixXd kff = kernel_matrix(x, x, p);
  kff.diagonal().array() += p.sigma * p.sigma;
  const auto chol = robust_cholesky(kff);
  Eigen::MatrixXd kgf(m, n), kgg(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) kgf(i, j) = site_cross(v, i, x.row(j).transpose(), -1, p);
    for (Eigen::Index j = 0; j < m; ++j) kgg(i, j) = site_cross(v, i, v.x.row(j).transpose(), v.dims[static_cast<std::size_t>(j)], p) *
                                                      v.signs[static_cast<std::size_t>(v.dims[static_cast<std::size_t>(j)])];
  }
  Marginal out;
  out.m0 = kgf * chol.llt.solve(y);
  const Eigen::MatrixXd w = chol.llt.matrixL().solve(kgf.transpose());
  out.c0 = kgg - w.transpose() * w;
  out.c0 = 0.5 * (out.c0 + out.c0.transpose()).eval();
  return out;
}

// Posterior over the derivatives for prior N(m0, C0) and sites (tau, nu):
// Sigma = C0 - C0 S^1/2 (I + S^1/2 C0 S^1/2)^-1 S^1/2 C0, mu = m0 + Sigma (nu - tau m0).
void recompute_posterior(const Marginal& g, const Eigen::VectorXd& tau, const Eigen::VectorXd& nu, Eigen::MatrixXd& sigma,
                         Eigen::VectorXd& mu) {
  const Eigen::VectorXd sq = tau.array().sqrt();
  Eigen::MatrixXd b = sq.asDiagonal() * g.c0 * sq.asDiagonal();
  b.diagonal().array() += 1.0;
  const auto chol = robust_cholesky(b);
  const Eigen::MatrixXd v = chol.llt.matrixL().solve(sq.asDiagonal() * g.c0);
  sigma = g.c0 - v.transpose() * v;
  mu = g.m0 + sigma * (nu - tau.cwiseProduct(g.m0));
}

struct Cavity {
  double mean, var;
};

Cavity cavity(double post_mean, double post_var, double tau, double nu) {
  const double denom = 1.0 - tau * post_var;
  const double var = post_var / denom;
  return {var * (post_mean / post_var - nu), var};
}

std::string trace_text(const std::vector<double>& trace) {
  std::ostringstream os;
  os << "change per sweep:";
  for (double t : trace) os << ' ' << csv::format_double(t);
  return os.str();
}

}  // namespace

double log_normal_cdf(double z) {
  if (z > -30) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  return -0.5 * z * z - 0.5 * std::log(2 * std::numbers::pi) - std::log(normal_pdf_cdf_ratio(z));
}

double normal_pdf_cdf_ratio(double z) {
  if (z > -30) {
    const double log_pdf = -0.5 * z * z - 0.5 * std::log(2 * std::numbers::pi);
    return std::exp(log_pdf - std::log(0.5 * std::erfc(-z / std::numbers::sqrt2)));
  }
  // Mills-ratio asymptotic series for the lower tail.
  const double t = 1.0 / (z * z);
  return -z / (1.0 - t * (1.0 - t * (3.0 - t * (15.0 - 105.0 * t))));
}

void VirtualPoints::validate(Eigen::Index input_dims) const {
  if (x.rows() > 0 && x.cols() != input_dims) throw Error(ErrorCode::InvalidArgument, "virtual points have the wrong dimension");
  if (dims.size() != static_cast<std::size_t>(x.rows()))
    throw Error(ErrorCode::InvalidArgument, "need one constrained dimension per virtual point");
  if (signs.size() != static_cast<std::size_t>(input_dims))
    throw Error(ErrorCode::InvalidArgument, "need one derivative sign per input dimension");
  for (int s : signs)
    if (s != 1 && s != -1) throw Error(ErrorCode::InvalidArgument, "derivative signs must be +1 or -1");
  for (int d : dims)
    if (d < 0 || d >= input_dims) throw Error(ErrorCode::InvalidArgument, "constrained dimension out of range");
}

VirtualPoints place_virtual_points(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int m, std::vector<int> signs) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "virtual point budget must be >= 0");
  if (lo.size() != hi.size() || lo.size() == 0 || (lo.array() > hi.array()).any())
    throw Error(ErrorCode::InvalidArgument, "virtual point box needs lo <= hi per dimension");
  const auto d = lo.size();
  VirtualPoints v;
  v.signs = std::move(signs);
  v.x.resize(m, d);
  if (m > 0) {
    SobolSequence seq(static_cast<int>(d));
    seq.skip(1);
    for (int i = 0; i < m; ++i) {
      const auto u = seq.next();
      for (Eigen::Index j = 0; j < d; ++j) v.x(i, j) = lo[j] + u[static_cast<std::size_t>(j)] * (hi[j] - lo[j]);
      v.dims.push_back(static_cast<int>(i % d));
    }
  }
  v.validate(d);
  return v;
}

Eigen::VectorXd EpSites::means() const {
  Eigen::VectorXd out(tau.size());
  for (Eigen::Index i = 0; i < tau.size(); ++i) out[i] = tau[i] > 0 ? nu_tilde[i] / tau[i] : std::numeric_limits<double>::quiet_NaN();
  return out;
}

Eigen::VectorXd EpSites::variances() const {
  Eigen::VectorXd out(tau.size());
  for (Eigen::Index i = 0; i < tau.size(); ++i) out[i] = tau[i] > 0 ? 1.0 / tau[i] : kInf;
  return out;
}

Eigen::MatrixXd joint_covariance(const Eigen::MatrixXd& x, const VirtualPoints& v, const KernelParams& p) {
  const Eigen::Index n = x.rows(), m = v.size();
  Eigen::MatrixXd k(n + m, n + m);
  k.topLeftCorner(n, n) = kernel_matrix(x, x, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) k(n + i, j) = k(j, n + i) = site_cross(v, i, x.row(j).transpose(), -1, p);
    for (Eigen::Index j = 0; j < m; ++j) {
      const int dj = v.dims[static_cast<std::size_t>(j)];
      k(n + i, n + j) = site_cross(v, i, v.x.row(j).transpose(), dj, p) * v.signs[static_cast<std::size_t>(dj)];
    }
  }
  return k;
}

MonotonicGPModel MonotonicGPModel::fit(Eigen::MatrixXd x, Eigen::VectorXd y, KernelParams params, VirtualPoints virt,
                                       const EpConfig& cfg) {
  if (!(cfg.nu > 0) || !(cfg.damping > 0 && cfg.damping <= 1) || cfg.max_sweeps < 1 || !(cfg.tolerance > 0))
    throw Error(ErrorCode::InvalidArgument, "EP needs nu > 0, damping in (0, 1], max_sweeps >= 1, tolerance > 0");
  if (x.rows() != y.size() || x.rows() < 1) throw Error(ErrorCode::InvalidArgument, "X and y lengths differ or are empty");
  params.validate(x.cols());
  virt.validate(x.cols());

  const Eigen::Index m = virt.size();
  EpSites sites;
  sites.tau = Eigen::VectorXd::Zero(m);
  sites.nu_tilde = Eigen::VectorXd::Zero(m);
  if (m == 0) {
    sites.converged = true;
    return MonotonicGPModel(std::move(x), std::move(y), std::move(params), std::move(virt), cfg, std::move(sites));
  }

  const Marginal g = condition_on_data(x, y, virt, params);
  Eigen::MatrixXd sigma = g.c0;
  Eigen::VectorXd mu = g.m0;
  const double nu2 = cfg.nu * cfg.nu;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const Eigen::VectorXd tau_old = sites.tau, nu_old = sites.nu_tilde;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Cavity c = cavity(mu[i], sigma(i, i), sites.tau[i], sites.nu_tilde[i]);
      if (!(c.var > 0) || !std::isfinite(c.var)) continue;  // skip this site for the sweep
      const double s = std::sqrt(nu2 + c.var);
      const double z = c.mean / s;
      const double r = normal_pdf_cdf_ratio(z);
      const double a = r * (z + r) / (s * s);
      const double b = std::min(c.var * a, 1.0 - 1e-12);
      double tau_new = std::max(0.0, a / (1.0 - b));
      double nu_new = tau_new > 0 ? (c.mean * a + r / s) / (1.0 - b) : 0.0;
      tau_new = cfg.damping * tau_new + (1.0 - cfg.damping) * sites.tau[i];
      nu_new = cfg.damping * nu_new + (1.0 - cfg.damping) * sites.nu_tilde[i];
      const double dtau = tau_new - sites.tau[i], dnu = nu_new - sites.nu_tilde[i];
      const double denom = 1.0 + dtau * sigma(i, i);
      if (!(denom > 0) || !std::isfinite(tau_new) || !std::isfinite(nu_new)) continue;
      const Eigen::VectorXd col = sigma.col(i);
      mu += col * ((dnu - dtau * mu[i]) / denom);
      sigma -= (dtau / denom) * col * col.transpose();
      sites.tau[i] = tau_new;
      sites.nu_tilde[i] = nu_new;
    }
    if (!sites.tau.allFinite() || !sites.nu_tilde.allFinite())
      throw Error(ErrorCode::EpDivergence, "site parameters became non-finite in sweep " + std::to_string(sweep) + "; " +
                                               trace_text(sites.trace));
    try {
      recompute_posterior(g, sites.tau, sites.nu_tilde, sigma, mu);
    } catch (const Error&) {
      throw Error(ErrorCode::EpDivergence, "posterior lost positive definiteness in sweep " + std::to_string(sweep) + "; " +
                                               trace_text(sites.trace));
    }
    double change = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      change = std::max({change, std::abs(sites.tau[i] - tau_old[i]) / (1.0 + std::abs(sites.tau[i])),
                         std::abs(sites.nu_tilde[i] - nu_old[i]) / (1.0 + std::abs(sites.nu_tilde[i]))});
    sites.trace.push_back(change);
    sites.sweeps = sweep;
    if (!std::isfinite(change) || !mu.allFinite())
      throw Error(ErrorCode::EpDivergence, "posterior became non-finite; " + trace_text(sites.trace));
    if (change < cfg.tolerance) {
      sites.converged = true;
      break;
    }
  }
  return MonotonicGPModel(std::move(x), std::move(y), std::move(params), std::move(virt), cfg, std::move(sites));
}

MonotonicGPModel::MonotonicGPModel(Eigen::MatrixXd x, Eigen::VectorXd y, KernelParams params, VirtualPoints virt,
                                   EpConfig config, EpSites sites)
    : x_(std::move(x)), y_(std::move(y)), params_(std::move(params)), virt_(std::move(virt)), config_(config),
      sites_(std::move(sites)) {
  if (x_.rows() != y_.size() || x_.rows() < 1) throw Error(ErrorCode::InvalidArgument, "X and y lengths differ or are empty");
  params_.validate(x_.cols());
  virt_.validate(x_.cols());
  if (sites_.tau.size() != virt_.size() || sites_.nu_tilde.size() != virt_.size())
    throw Error(ErrorCode::InvalidArgument, "need one EP site per virtual point");
  prepare();
}

void MonotonicGPModel::prepare() {
  const Eigen::Index n = x_.rows();
  active_.clear();
  for (Eigen::Index i = 0; i < virt_.size(); ++i) {
    const double rho = params_.rho[virt_.dims[static_cast<std::size_t>(i)]];
    if (sites_.tau[i] * params_.eta * params_.eta / (rho * rho) > kActiveFloor) active_.push_back(i);
  }
  const auto na = static_cast<Eigen::Index>(active_.size());

  // Joint system over the data and the active sites.
  VirtualPoints act;
  act.signs = virt_.signs;
  act.x.resize(na, x_.cols());
  Eigen::VectorXd target(n + na), site_var(na);
  target.head(n) = y_;
  for (Eigen::Index k = 0; k < na; ++k) {
    const Eigen::Index i = active_[static_cast<std::size_t>(k)];
    act.x.row(k) = virt_.x.row(i);
    act.dims.push_back(virt_.dims[static_cast<std::size_t>(i)]);
    target[n + k] = sites_.nu_tilde[i] / sites_.tau[i];
    site_var[k] = 1.0 / sites_.tau[i];
  }
  Eigen::MatrixXd a = joint_covariance(x_, act, params_);
  const Eigen::MatrixXd k_cols = a.rightCols(na);  // prior covariance with the sites
  a.diagonal().head(n).array() += params_.sigma * params_.sigma;
  a.diagonal().tail(na) += site_var;
  chol_ = robust_cholesky(a);
  alpha_ = chol_.llt.solve(target);

  const double log_det_half = chol_.llt.matrixLLT().diagonal().array().log().sum();
  log_z_ = -log_det_half - 0.5 * target.dot(alpha_) - 0.5 * static_cast<double>(n) * std::log(2 * std::numbers::pi);
  if (na == 0) return;

  // Cavity terms come from the posterior marginals at the sites.
  const Eigen::MatrixXd w = chol_.llt.matrixL().solve(k_cols);
  const Eigen::VectorXd post_mean = k_cols.transpose() * alpha_;
  const double nu2 = config_.nu * config_.nu;
  for (Eigen::Index k = 0; k < na; ++k) {
    const Eigen::Index i = active_[static_cast<std::size_t>(k)];
    const double post_var = k_cols(n + k, k) - w.col(k).squaredNorm();
    const Cavity c = cavity(post_mean[k], post_var, sites_.tau[i], sites_.nu_tilde[i]);
    const double mt = target[n + k], vt = site_var[k];
    log_z_ += (c.mean - mt) * (c.mean - mt) / (2 * (c.var + vt)) + log_normal_cdf(c.mean / std::sqrt(nu2 + c.var)) +
              0.5 * std::log(c.var + vt);
  }
}

Eigen::MatrixXd MonotonicGPModel::cross_covariance(const Eigen::MatrixXd& xs, int dim) const {
  const Eigen::Index n = x_.rows();
  const auto na = static_cast<Eigen::Index>(active_.size());
  Eigen::MatrixXd k(xs.rows(), n + na);
  for (Eigen::Index r = 0; r < xs.rows(); ++r) {
    const Eigen::VectorXd xr = xs.row(r).transpose();
    for (Eigen::Index j = 0; j < n; ++j)
      k(r, j) = dim < 0 ? kernel(xr, x_.row(j).transpose(), params_) : kernel_grad_first(xr, x_.row(j).transpose(), dim, params_);
    for (Eigen::Index t = 0; t < na; ++t) {
      const Eigen::Index i = active_[static_cast<std::size_t>(t)];
      // Cov(target at xr, site i) = Cov(site i, target at xr) by symmetry.
      k(r, n + t) = site_cross(virt_, i, xr, dim, params_);
    }
  }
  return k;
}

Prediction MonotonicGPModel::predict_impl(const Eigen::MatrixXd& xs, int dim, bool force) const {
  if (!sites_.converged && !force)
    throw Error(ErrorCode::EpNotConverged, "EP did not converge after " + std::to_string(sites_.sweeps) + " sweeps");
  if (xs.cols() != x_.cols()) throw Error(ErrorCode::InvalidArgument, "test inputs have the wrong dimension");
  if (dim >= x_.cols()) throw Error(ErrorCode::InvalidArgument, "derivative dimension out of range");
  const Eigen::MatrixXd ks = cross_covariance(xs, dim);
  Prediction out;
  out.mean = ks * alpha_;
  const Eigen::MatrixXd v = chol_.llt.matrixL().solve(ks.transpose());
  const double rho = dim < 0 ? 1.0 : params_.rho[dim];
  const double prior = params_.eta * params_.eta / (rho * rho);
  out.variance.resize(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.variance[i] = std::max(0.0, prior - v.col(i).squaredNorm());
  return out;
}

Prediction MonotonicGPModel::predict(const Eigen::MatrixXd& xs, bool force) const { return predict_impl(xs, -1, force); }

Prediction MonotonicGPModel::predict_derivative(const Eigen::MatrixXd& xs, int dim, bool force) const {
  if (dim < 0) throw Error(ErrorCode::InvalidArgument, "derivative dimension out of range");
  return predict_impl(xs, dim, force);
}

MonotonicFitResult fit_monotonic_hyperparameters(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const VirtualPoints& virt,
                                                 const EpConfig& ep, const OptimizerConfig& opt) {
  if (x.rows() < 2 || x.rows() != y.size()) throw Error(ErrorCode::InvalidArgument, "fitting needs at least two training points");
  const double sd = std::sqrt((y.array() - y.mean()).square().sum() / static_cast<double>(y.size() - 1));
  auto restarts = multistart_optimize(x.cols(), sd, opt, [&](const KernelParams& p) {
    return MonotonicGPModel::fit(x, y, p, virt, ep).log_z_ep();
  });
  const int best = best_restart(restarts);
  if (best < 0) throw Error(ErrorCode::NumericalFailure, "every optimizer restart failed");
  auto model = MonotonicGPModel::fit(x, y, restarts[static_cast<std::size_t>(best)].result, virt, ep);
  return {std::move(model), std::move(restarts), best};
}

}  // namespace fmb
