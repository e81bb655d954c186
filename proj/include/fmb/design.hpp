#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fmb {

enum class AxisScale { Linear, Log2 };

std::string_view to_string(AxisScale s);
/// "log2", "linear" or "lin".
AxisScale axis_scale_from_string(std::string_view s);

struct FeatureAxis {
  std::string name;
  AxisScale scale = AxisScale::Linear;
  double min = 0.0;
  double max = 0.0;
  bool integer_valued = false;

  /// Throws InvalidArgument on min > max, or log2 scale with min <= 0.
  void validate() const;
  bool contains(double v) const;
  /// Maps u in [0,1] onto the axis (log-uniform for log2 axes), rounding
  /// integer axes to the nearest integer with ties up.
  double from_unit(double u) const;

  friend bool operator==(const FeatureAxis&, const FeatureAxis&) = default;
};

/// Parses "name:scale:type:min:max", e.g. "w:log2:int:2:27" or "xi:lin:real:0:0.5".
FeatureAxis parse_axis(std::string_view spec);

struct FeatureSpace {
  std::vector<FeatureAxis> axes;

  void validate() const;
  int dimension() const { return static_cast<int>(axes.size()); }
  /// Axis position by name, or nullopt.
  std::optional<int> index_of(std::string_view name) const;

  friend bool operator==(const FeatureSpace&, const FeatureSpace&) = default;
};

using FeatureVector = std::vector<double>;

enum class DesignMethod { Grid, Sobol };

struct DesignPlan {
  FeatureSpace space;
  std::vector<FeatureVector> vectors;
  int k = 1;
  std::uint64_t seed = 0;
  DesignMethod method = DesignMethod::Grid;

  void validate() const;
  friend bool operator==(const DesignPlan&, const DesignPlan&) = default;
};

using Exclusion = std::function<bool(const FeatureVector&)>;

/// Cartesian product of `values` (one list per axis) in lexicographic order,
/// minus the vectors for which `exclude` returns true. Throws EmptyDesign.
DesignPlan grid_design(const FeatureSpace& space, const std::vector<std::vector<double>>& values,
                       const Exclusion& exclude = {}, int k = 1, std::uint64_t seed = 0);

/// M points of the unscrambled Sobol sequence (index 0 skipped) mapped onto
/// the axes. Throws UnsupportedDimension for too many axes.
DesignPlan sobol_design(const FeatureSpace& space, int m, int k = 1, std::uint64_t seed = 0);

/// Default grid values for an axis: every integer of a linear integer axis,
/// every power of two of a log2 integer axis. Real axes need explicit values.
std::vector<double> default_grid_values(const FeatureAxis& axis);

std::string design_to_json(const DesignPlan& plan);
DesignPlan design_from_json(std::string_view text);

/// Width {2..27} x depth {4,...,1024} x density {0,1/8,1/4} mirror-circuit
/// grid with K=10, dropping shapes whose w*d exceeds 3584 (531 vectors).
DesignPlan algiers_preset(std::uint64_t seed = 0);
/// 256 Sobol vectors over log2 width 2-20, log2 depth 2-128 and density
/// 0-1/2, K=30.
DesignPlan forte_preset(std::uint64_t seed = 0);

}  // namespace fmb
