#include "fmb/gp.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fmb/error.hpp"
#include "fmb/rng.hpp"

namespace fmb {
namespace {

double scaled_sqdist(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp,
                     const KernelParams& p) {
  if (x.size() != xp.size() || x.size() != p.rho.size())
    throw Error(ErrorCode::InvalidArgument, "kernel input dimensions disagree");
  return ((x - xp).array() / p.rho.array()).square().sum();
}

void check_dim(int g, const KernelParams& p) {
  if (g < 0 || g >= p.rho.size()) throw Error(ErrorCode::InvalidArgument, "derivative dimension out of range");
}

// Bounded parameterization: log p = lo + (hi - lo) * logistic(t).
struct Box {
  double lo, hi;
  double to_param(double t) const { return std::exp(lo + (hi - lo) / (1.0 + std::exp(-t))); }
  double to_free(double v) const {
    const double s = std::clamp((std::log(v) - lo) / (hi - lo), 1e-6, 1.0 - 1e-6);
    return std::log(s / (1.0 - s));
  }
};

struct Problem {
  std::vector<Box> boxes;  // eta, rho..., sigma
  const HyperObjective* objective;

  KernelParams unpack(const double* t) const {
    KernelParams p;
    const auto d = static_cast<Eigen::Index>(boxes.size() - 2);
    p.eta = boxes[0].to_param(t[0]);
    p.rho.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) p.rho[i] = boxes[static_cast<std::size_t>(i + 1)].to_param(t[i + 1]);
    p.sigma = boxes.back().to_param(t[d + 1]);
    return p;
  }
  std::vector<double> pack(const KernelParams& p) const {
    std::vector<double> t(boxes.size());
    t[0] = boxes[0].to_free(p.eta);
    for (Eigen::Index i = 0; i < p.rho.size(); ++i)
      t[static_cast<std::size_t>(i + 1)] = boxes[static_cast<std::size_t>(i + 1)].to_free(p.rho[i]);
    t.back() = boxes.back().to_free(p.sigma);
    return t;
  }
};

double negated_objective(const gsl_vector* v, void* params) {
  const auto* prob = static_cast<const Problem*>(params);
  try {
    const double f = (*prob->objective)(prob->unpack(v->data));
    return std::isfinite(f) ? -f : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

RestartResult run_restart(const Problem& prob, const KernelParams& start, const OptimizerConfig& cfg) {
  RestartResult r;
  r.start = start;
  const auto t0 = prob.pack(start);
  const std::size_t n = t0.size();
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, t0[i]);
    gsl_vector_set(step, i, 1.0);
  }
  gsl_multimin_function f{&negated_objective, n, const_cast<Problem*>(&prob)};
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &f, x, step);
  int status = GSL_CONTINUE;
  int iter = 0;
  while (status == GSL_CONTINUE && iter < cfg.max_iterations) {
    ++iter;
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), cfg.tolerance);
  }
  r.iterations = iter;
  r.result = prob.unpack(gsl_multimin_fminimizer_x(s)->data);
  const double fmin = gsl_multimin_fminimizer_minimum(s);
  r.ok = std::isfinite(fmin);
  r.log_ml = r.ok ? -fmin : -std::numeric_limits<double>::infinity();
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);
  return r;
}

}  // namespace

void KernelParams::validate(Eigen::Index dims) const {
  if (!(eta > 0) || !(sigma >= 0) || rho.size() != dims || !(rho.array() > 0).all() || !rho.allFinite() ||
      !std::isfinite(eta) || !std::isfinite(sigma))
    throw Error(ErrorCode::InvalidArgument, "kernel parameters need eta > 0, rho > 0 per dimension, sigma >= 0");
}

double kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, const KernelParams& p) {
  return p.eta * p.eta * std::exp(-0.5 * scaled_sqdist(x, xp, p));
}

double kernel_grad_first(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, int g,
                         const KernelParams& p) {
  check_dim(g, p);
  const double r2 = p.rho[g] * p.rho[g];
  return -kernel(x, xp, p) * (x[g] - xp[g]) / r2;
}

double kernel_grad_second(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, int h,
                          const KernelParams& p) {
  check_dim(h, p);
  const double r2 = p.rho[h] * p.rho[h];
  return kernel(x, xp, p) * (x[h] - xp[h]) / r2;
}

double kernel_grad_both(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& xp, int g, int h,
                        const KernelParams& p) {
  check_dim(g, p);
  check_dim(h, p);
  const double rg2 = p.rho[g] * p.rho[g], rh2 = p.rho[h] * p.rho[h];
  const double delta = g == h ? 1.0 : 0.0;
  return kernel(x, xp, p) / rg2 * (delta - (x[g] - xp[g]) * (x[h] - xp[h]) / rh2);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::InvalidArgument, "kernel input dimensions disagree");
  p.validate(a.cols());
  // Columns of the scaled transposes are contiguous points; the same
  // per-coordinate differences as kernel(), without per-pair copies.
  const Eigen::MatrixXd at = (a * p.rho.cwiseInverse().asDiagonal()).transpose();
  const Eigen::MatrixXd bt = (b * p.rho.cwiseInverse().asDiagonal()).transpose();
  const double eta2 = p.eta * p.eta;
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) k(i, j) = eta2 * std::exp(-0.5 * (at.col(i) - bt.col(j)).squaredNorm());
  return k;
}

JitteredCholesky robust_cholesky(const Eigen::MatrixXd& a) {
  JitteredCholesky out;
  if (!a.allFinite()) throw Error(ErrorCode::NumericalFailure, "matrix has non-finite entries");
  for (double jitter : {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6}) {
    Eigen::MatrixXd m = a;
    m.diagonal().array() += jitter;
    out.llt.compute(m);
    if (out.llt.info() == Eigen::Success && (out.llt.matrixLLT().diagonal().array() > 0).all()) {
      out.jitter = jitter;
      return out;
    }
  }
  throw Error(ErrorCode::NumericalFailure, "matrix is not positive definite even with 1e-6 jitter");
}

GPModel::GPModel(Eigen::MatrixXd x, Eigen::VectorXd y, KernelParams params)
    : x_(std::move(x)), y_(std::move(y)), params_(std::move(params)) {
  if (x_.rows() != y_.size()) throw Error(ErrorCode::InvalidArgument, "X and y lengths differ");
  if (x_.rows() < 1) throw Error(ErrorCode::InvalidArgument, "GP needs at least one training point");
  params_.validate(x_.cols());
  Eigen::MatrixXd k = kernel_matrix(x_, x_, params_);
  k.diagonal().array() += params_.sigma * params_.sigma;
  chol_ = robust_cholesky(k);
  alpha_ = chol_.llt.solve(y_);
}

double GPModel::log_marginal_likelihood() const {
  const double n = static_cast<double>(y_.size());
  const double log_det_half = chol_.llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y_.dot(alpha_) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Prediction GPModel::predict(const Eigen::MatrixXd& xs) const {
  if (xs.cols() != x_.cols()) throw Error(ErrorCode::InvalidArgument, "test inputs have the wrong dimension");
  const Eigen::MatrixXd ks = kernel_matrix(xs, x_, params_);
  Prediction out;
  out.mean = ks * alpha_;
  const Eigen::MatrixXd v = chol_.llt.matrixL().solve(ks.transpose());
  out.variance.resize(xs.rows());
  const double prior = params_.eta * params_.eta;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.variance[i] = std::max(0.0, prior - v.col(i).squaredNorm());
  return out;
}

std::vector<RestartResult> multistart_optimize(Eigen::Index dims, double y_scale, const OptimizerConfig& cfg,
                                               const HyperObjective& objective) {
  if (cfg.restarts < 1) throw Error(ErrorCode::InvalidArgument, "need at least one optimizer restart");
  if (!(cfg.eta_min > 0 && cfg.eta_min <= cfg.eta_max && cfg.rho_min > 0 && cfg.rho_min <= cfg.rho_max && cfg.sigma_min > 0 &&
        cfg.sigma_min <= cfg.sigma_max))
    throw Error(ErrorCode::InvalidArgument, "hyperparameter bounds must be positive and ordered");
  gsl_set_error_handler_off();
  Problem prob{{}, &objective};
  prob.boxes.push_back({std::log(cfg.eta_min), std::log(cfg.eta_max)});
  for (Eigen::Index d = 0; d < dims; ++d) prob.boxes.push_back({std::log(cfg.rho_min), std::log(cfg.rho_max)});
  prob.boxes.push_back({std::log(cfg.sigma_min), std::log(cfg.sigma_max)});

  const double scale = y_scale > 0 && std::isfinite(y_scale) ? y_scale : 1.0;
  std::vector<KernelParams> starts(static_cast<std::size_t>(cfg.restarts));
  starts[0].eta = std::clamp(scale, cfg.eta_min, cfg.eta_max);
  starts[0].rho = Eigen::VectorXd::Constant(dims, std::clamp(1.0, cfg.rho_min, cfg.rho_max));
  starts[0].sigma = std::clamp(scale / 10, cfg.sigma_min, cfg.sigma_max);
  for (int r = 1; r < cfg.restarts; ++r) {
    Rng rng = make_rng(cfg.seed, {kTagOptimizer, static_cast<std::uint64_t>(r)});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&](const Box& b) { return std::exp(b.lo + u(rng) * (b.hi - b.lo)); };
    auto& s = starts[static_cast<std::size_t>(r)];
    s.eta = draw(prob.boxes[0]);
    s.rho.resize(dims);
    for (Eigen::Index d = 0; d < dims; ++d) s.rho[d] = draw(prob.boxes[static_cast<std::size_t>(d + 1)]);
    s.sigma = draw(prob.boxes.back());
  }

  std::vector<RestartResult> out(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.restarts; ++r)
    out[static_cast<std::size_t>(r)] = run_restart(prob, starts[static_cast<std::size_t>(r)], cfg);
  return out;
}

int best_restart(const std::vector<RestartResult>& restarts) {
  int best = -1;
  for (std::size_t r = 0; r < restarts.size(); ++r)
    if (restarts[r].ok && (best < 0 || restarts[r].log_ml > restarts[static_cast<std::size_t>(best)].log_ml))
      best = static_cast<int>(r);
  return best;
}

FitResult fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const OptimizerConfig& cfg) {
  if (x.rows() < 2) throw Error(ErrorCode::InvalidArgument, "fitting needs at least two training points");
  if (x.rows() != y.size()) throw Error(ErrorCode::InvalidArgument, "X and y lengths differ");
  const double sd = std::sqrt((y.array() - y.mean()).square().sum() / static_cast<double>(y.size() - 1));
  FitResult out;
  out.restarts = multistart_optimize(x.cols(), sd, cfg, [&](const KernelParams& p) {
    return GPModel(x, y, p).log_marginal_likelihood();
  });
  out.best = best_restart(out.restarts);
  if (out.best < 0) throw Error(ErrorCode::NumericalFailure, "every optimizer restart failed");
  out.model = GPModel(x, y, out.restarts[static_cast<std::size_t>(out.best)].result);
  return out;
}

}  // namespace fmb
