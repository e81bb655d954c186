#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fmb/design.hpp"
#include "fmb/gp.hpp"
#include "fmb/monotonic_gp.hpp"

namespace fmb {

struct CapabilityModelConfig {
  bool monotonic = false;
  int virtual_points_per_dim = 10;
  std::vector<int> signs;  // per feature; empty means decreasing everywhere
  EpConfig ep;
  OptimizerConfig optimizer;
  bool reoptimize_ep = false;   // maximize log Z_EP instead of reusing the regular fit
  bool force_unconverged = false;
};

/// Maps feature vectors to model inputs: log2 on log2 axes, then centering
/// and scaling by the training-set mean and standard deviation.
struct InputTransform {
  std::vector<AxisScale> scales;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static InputTransform fit(const FeatureSpace& space, const std::vector<FeatureVector>& x);
  Eigen::VectorXd apply(const FeatureVector& v) const;
  Eigen::MatrixXd apply(const std::vector<FeatureVector>& v) const;
};

/// GP (optionally monotonic) from feature vectors to mean capability.
/// Targets are centered on their training mean; predictions are unclamped.
class CapabilityModel {
 public:
  static CapabilityModel fit(const FeatureSpace& space, const std::vector<FeatureVector>& x, const std::vector<double>& y,
                             const CapabilityModelConfig& config = {});

  /// Throws EpNotConverged for an unconverged monotonic model unless the
  /// model was fit with force_unconverged.
  Prediction predict(const std::vector<FeatureVector>& x) const;

  const FeatureSpace& space() const { return space_; }
  const KernelParams& params() const { return gp_.params(); }
  bool monotonic() const { return mono_.has_value(); }
  const MonotonicGPModel* monotonic_model() const { return mono_ ? &*mono_ : nullptr; }
  const GPModel& regular_model() const { return gp_; }
  const InputTransform& transform() const { return transform_; }
  double target_mean() const { return y_mean_; }
  const std::vector<RestartResult>& restarts() const { return restarts_; }
  bool forced() const { return forced_; }

  std::string to_json() const;
  static CapabilityModel from_json(std::string_view text);

 private:
  CapabilityModel() = default;

  FeatureSpace space_;
  InputTransform transform_;
  double y_mean_ = 0.0;
  GPModel gp_;
  std::optional<MonotonicGPModel> mono_;
  std::uint64_t optimizer_seed_ = 0;
  std::vector<RestartResult> restarts_;
  bool forced_ = false;
};

}  // namespace fmb
