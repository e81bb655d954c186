#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fmb/capability_model.hpp"
#include "fmb/design.hpp"
#include "fmb/estimators.hpp"

namespace fmb {

struct VectorSummary {
  FeatureVector v;
  std::vector<double> estimates;  // one per circuit, j order
  double mean = 0.0;
  double std_error = 0.0;
};

struct CapabilityDataset {
  FeatureSpace space;
  EstimatorKind kind = EstimatorKind::SuccessProbability;
  std::vector<VectorSummary> vectors;

  std::vector<FeatureVector> inputs() const;
  std::vector<double> means() const;
};

/// Groups per-circuit records by feature vector. Standard errors come from the
/// records when every record of a vector carries the same one (SR-DFE's paired
/// bootstrap), otherwise from a bootstrap over the K estimates. Throws
/// MissingData listing every absent (i, j).
CapabilityDataset assemble_dataset(const DesignPlan& design, std::span<const CapabilityRecord> records, int bootstrap = 1000);

/// CSV with one row per vector: index, features, mean, stderr, then the K
/// per-circuit estimates.
std::string dataset_csv(const CapabilityDataset& ds);

struct SplitSpec {
  double fraction = 0.5;
  std::uint64_t seed = 0;
  std::vector<int> train;  // sorted
  std::vector<int> test;   // sorted
};

/// Uniform random partition with round(fraction * n) training indices
/// (halves round up). Throws InvalidArgument when a side would be empty.
SplitSpec split(std::size_t n, double fraction, std::uint64_t seed);

/// Mean absolute difference.
double delta_abs(std::span<const double> predictions, std::span<const double> observations);

struct DeltaEntry {
  int index = 0;
  double delta = 0.0;      // min over comparators of mean(v') - mean(v)
  double std_error = 0.0;  // combined stderr of the minimizing pair
  int comparators = 0;
  int argmin = -1;
};

struct MonotonicityReport {
  std::vector<int> features;  // feature indices used for ordering
  std::vector<DeltaEntry> entries;
  int without_comparator = 0;
};

/// v' precedes v when v'_k <= v_k on every used feature and v'_k < v_k on at
/// least one; equal projections are not comparators.
MonotonicityReport delta_v(const CapabilityDataset& ds, const std::vector<int>& features);
/// The full feature set followed by each leave-one-out projection.
std::vector<MonotonicityReport> delta_v_with_projections(const CapabilityDataset& ds);
std::string monotonicity_csv(const CapabilityDataset& ds, const std::vector<MonotonicityReport>& reports);

struct GridAxis {
  int feature = 0;
  double min = 0.0, max = 0.0;
  int points = 2;  // log-spaced on log2 axes
  std::vector<double> values(const FeatureSpace& space) const;
};
/// "name:min:max:points".
GridAxis parse_grid_axis(const FeatureSpace& space, std::string_view spec);

struct Heatmap {
  int row_feature = 0, col_feature = 1;
  std::vector<double> row_values, col_values;
  Eigen::MatrixXd values;  // NaN where there is nothing to show
};

/// Model predictions over rows x cols with the other features held at
/// `fixed` (full-length; the plotted entries are ignored), clamped to [0, 1].
Heatmap continuous_volumetric_grid(const CapabilityModel& model, const GridAxis& rows, const GridAxis& cols,
                                   const FeatureVector& fixed);
/// Observed means on the design's own values of two features, restricted to
/// vectors that match `fixed` on the remaining features (NaN entries of
/// `fixed` match anything). Cells sharing a position are averaged.
Heatmap volumetric_heatmap(const CapabilityDataset& ds, int row_feature, int col_feature, const FeatureVector& fixed);
std::string heatmap_csv(const Heatmap& h, const FeatureSpace& space);

struct SplitEvaluation {
  std::vector<double> delta_abs;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
};

/// Trains `instances` models on independent random splits and scores each on
/// its held-out vectors. Instance r splits with derive_seed(seed, {split, r})
/// and optimizes with derive_seed(seed, {optimizer, r}).
SplitEvaluation evaluate_splits(const CapabilityDataset& ds, double fraction, int instances, std::uint64_t seed,
                                const CapabilityModelConfig& config);

}  // namespace fmb
