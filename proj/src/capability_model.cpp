#include "fmb/capability_model.hpp"

#include <cmath>

#include "fmb/error.hpp"
#include "json_io.hpp"

namespace fmb {
namespace {

using json_io::json;

double raw_input(AxisScale s, double v) { return s == AxisScale::Log2 ? std::log2(v) : v; }

json params_to_json(const KernelParams& p) {
  return {{"eta", p.eta}, {"rho", json_io::vector_to_json(p.rho)}, {"sigma", p.sigma}};
}

KernelParams params_from_json(const json& j) {
  KernelParams p;
  p.eta = j.at("eta").get<double>();
  p.rho = json_io::vector_from_json(j.at("rho"));
  p.sigma = j.at("sigma").get<double>();
  return p;
}

}  // namespace

InputTransform InputTransform::fit(const FeatureSpace& space, const std::vector<FeatureVector>& x) {
  space.validate();
  if (x.empty()) throw Error(ErrorCode::InvalidArgument, "no training vectors");
  InputTransform t;
  const auto d = static_cast<Eigen::Index>(space.axes.size());
  for (const auto& a : space.axes) t.scales.push_back(a.scale);
  t.mean = Eigen::VectorXd::Zero(d);
  t.scale = Eigen::VectorXd::Ones(d);
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(x.size()), d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != space.axes.size()) throw Error(ErrorCode::InvalidArgument, "feature vector has the wrong dimension");
    for (Eigen::Index k = 0; k < d; ++k)
      raw(static_cast<Eigen::Index>(i), k) = raw_input(t.scales[static_cast<std::size_t>(k)], x[i][static_cast<std::size_t>(k)]);
  }
  t.mean = raw.colwise().mean().transpose();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double var = (raw.col(k).array() - t.mean[k]).square().mean();
    t.scale[k] = var > 1e-24 ? std::sqrt(var) : 1.0;  // constant axes stay unscaled
  }
  return t;
}

Eigen::VectorXd InputTransform::apply(const FeatureVector& v) const {
  if (v.size() != scales.size()) throw Error(ErrorCode::InvalidArgument, "feature vector has the wrong dimension");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (scales[k] == AxisScale::Log2 && !(v[k] > 0)) throw Error(ErrorCode::InvalidArgument, "log2 feature must be positive");
    const auto i = static_cast<Eigen::Index>(k);
    out[i] = (raw_input(scales[k], v[k]) - mean[i]) / scale[i];
  }
  return out;
}

Eigen::MatrixXd InputTransform::apply(const std::vector<FeatureVector>& v) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(scales.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = apply(v[i]).transpose();
  return out;
}

CapabilityModel CapabilityModel::fit(const FeatureSpace& space, const std::vector<FeatureVector>& x, const std::vector<double>& y,
                                     const CapabilityModelConfig& cfg) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "feature vectors and targets differ in length");
  if (x.size() < 2) throw Error(ErrorCode::InvalidArgument, "a capability model needs at least two training vectors");
  CapabilityModel m;
  m.space_ = space;
  m.transform_ = InputTransform::fit(space, x);
  const Eigen::MatrixXd xs = m.transform_.apply(x);
  Eigen::VectorXd ys = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  m.y_mean_ = ys.mean();
  ys.array() -= m.y_mean_;
  m.optimizer_seed_ = cfg.optimizer.seed;

  auto fitted = fmb::fit(xs, ys, cfg.optimizer);
  m.gp_ = std::move(fitted.model);
  m.restarts_ = std::move(fitted.restarts);

  if (cfg.monotonic) {
    const auto d = static_cast<Eigen::Index>(space.axes.size());
    std::vector<int> signs = cfg.signs.empty() ? std::vector<int>(static_cast<std::size_t>(d), -1) : cfg.signs;
    FeatureVector lo, hi;
    for (const auto& a : space.axes) {
      lo.push_back(a.min);
      hi.push_back(a.max);
    }
    const auto virt = place_virtual_points(m.transform_.apply(lo), m.transform_.apply(hi),
                                           cfg.virtual_points_per_dim * static_cast<int>(d), std::move(signs));
    if (cfg.reoptimize_ep) {
      auto res = fit_monotonic_hyperparameters(xs, ys, virt, cfg.ep, cfg.optimizer);
      m.mono_.emplace(std::move(res.model));
      m.restarts_ = std::move(res.restarts);
      m.gp_ = GPModel(xs, ys, m.mono_->params());
    } else {
      m.mono_.emplace(MonotonicGPModel::fit(xs, ys, m.gp_.params(), virt, cfg.ep));
    }
    if (!m.mono_->converged()) {
      if (!cfg.force_unconverged)
        throw Error(ErrorCode::EpNotConverged,
                    "EP did not converge after " + std::to_string(m.mono_->sites().sweeps) + " sweeps (last change " +
                        std::to_string(m.mono_->sites().trace.empty() ? 0.0 : m.mono_->sites().trace.back()) + ")");
      m.forced_ = true;
    }
  }
  return m;
}

Prediction CapabilityModel::predict(const std::vector<FeatureVector>& x) const {
  const Eigen::MatrixXd xs = transform_.apply(x);
  Prediction p = mono_ ? mono_->predict(xs, forced_) : gp_.predict(xs);
  p.mean.array() += y_mean_;
  return p;
}

std::string CapabilityModel::to_json() const {
  json restarts = json::array();
  for (const auto& r : restarts_)
    restarts.push_back({{"start", params_to_json(r.start)},
                        {"result", params_to_json(r.result)},
                        {"log_ml", r.ok ? json(r.log_ml) : json(nullptr)},
                        {"ok", r.ok},
                        {"iterations", r.iterations}});
  std::vector<std::string> scales;
  for (auto s : transform_.scales) scales.emplace_back(to_string(s));
  json doc = {{"model", mono_ ? "monotonic_gp" : "gp"},
              {"axes", json_io::space_to_json(space_)},
              {"input_mean", json_io::vector_to_json(transform_.mean)},
              {"input_scale", json_io::vector_to_json(transform_.scale)},
              {"target_mean", y_mean_},
              {"params", params_to_json(gp_.params())},
              {"x", json_io::matrix_to_json(gp_.x())},
              {"y", json_io::vector_to_json(gp_.y())},
              {"log_marginal_likelihood", gp_.log_marginal_likelihood()},
              {"optimizer_seed", optimizer_seed_},
              {"restarts", restarts}};
  if (mono_) {
    const auto& v = mono_->virtual_points();
    const auto& s = mono_->sites();
    doc["monotonic"] = {{"virtual_x", json_io::matrix_to_json(v.x)},
                        {"virtual_dims", v.dims},
                        {"signs", v.signs},
                        {"nu", mono_->config().nu},
                        {"damping", mono_->config().damping},
                        {"max_sweeps", mono_->config().max_sweeps},
                        {"tolerance", mono_->config().tolerance},
                        {"site_tau", json_io::vector_to_json(s.tau)},
                        {"site_nu", json_io::vector_to_json(s.nu_tilde)},
                        {"converged", s.converged},
                        {"forced", forced_},
                        {"sweeps", s.sweeps},
                        {"trace", s.trace},
                        {"log_z_ep", mono_->log_z_ep()}};
  }
  return doc.dump(1) + "\n";
}

CapabilityModel CapabilityModel::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    CapabilityModel m;
    m.space_ = json_io::space_from_json(doc.at("axes"));
    for (const auto& a : m.space_.axes) m.transform_.scales.push_back(a.scale);
    m.transform_.mean = json_io::vector_from_json(doc.at("input_mean"));
    m.transform_.scale = json_io::vector_from_json(doc.at("input_scale"));
    const auto d = static_cast<Eigen::Index>(m.space_.axes.size());
    if (m.transform_.mean.size() != d || m.transform_.scale.size() != d)
      throw Error(ErrorCode::ParseError, "model input transform has the wrong dimension");
    m.y_mean_ = doc.at("target_mean").get<double>();
    m.optimizer_seed_ = doc.at("optimizer_seed").get<std::uint64_t>();
    for (const auto& r : doc.at("restarts")) {
      RestartResult rr;
      rr.start = params_from_json(r.at("start"));
      rr.result = params_from_json(r.at("result"));
      rr.ok = r.at("ok").get<bool>();
      rr.log_ml = rr.ok ? r.at("log_ml").get<double>() : -std::numeric_limits<double>::infinity();
      rr.iterations = r.at("iterations").get<int>();
      m.restarts_.push_back(rr);
    }
    const auto params = params_from_json(doc.at("params"));
    const Eigen::MatrixXd x = json_io::matrix_from_json(doc.at("x"), d);
    const Eigen::VectorXd y = json_io::vector_from_json(doc.at("y"));
    m.gp_ = GPModel(x, y, params);
    const auto kind = doc.at("model").get<std::string>();
    if (kind == "monotonic_gp") {
      const auto& mj = doc.at("monotonic");
      VirtualPoints v;
      v.x = json_io::matrix_from_json(mj.at("virtual_x"), d);
      v.dims = mj.at("virtual_dims").get<std::vector<int>>();
      v.signs = mj.at("signs").get<std::vector<int>>();
      EpConfig cfg;
      cfg.nu = mj.at("nu").get<double>();
      cfg.damping = mj.at("damping").get<double>();
      cfg.max_sweeps = mj.at("max_sweeps").get<int>();
      cfg.tolerance = mj.at("tolerance").get<double>();
      EpSites s;
      s.tau = json_io::vector_from_json(mj.at("site_tau"));
      s.nu_tilde = json_io::vector_from_json(mj.at("site_nu"));
      s.converged = mj.at("converged").get<bool>();
      s.sweeps = mj.at("sweeps").get<int>();
      s.trace = mj.at("trace").get<std::vector<double>>();
      m.forced_ = mj.at("forced").get<bool>();
      m.mono_.emplace(x, y, params, std::move(v), cfg, std::move(s));
    } else if (kind != "gp") {
      throw Error(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
  }
}

}  // namespace fmb
