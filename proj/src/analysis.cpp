#include "fmb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "fmb/csv.hpp"
#include "fmb/error.hpp"
#include "fmb/rng.hpp"

namespace fmb {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool precedes(const FeatureVector& a, const FeatureVector& b, const std::vector<int>& features) {
  bool strict = false;
  for (int f : features) {
    const auto k = static_cast<std::size_t>(f);
    if (a[k] > b[k]) return false;
    strict = strict || a[k] < b[k];
  }
  return strict;
}

std::string subset_label(const FeatureSpace& space, const std::vector<int>& features) {
  if (static_cast<int>(features.size()) == space.dimension()) return "full";
  std::string out = "drop";
  for (int k = 0; k < space.dimension(); ++k)
    if (std::find(features.begin(), features.end(), k) == features.end()) out += "_" + space.axes[static_cast<std::size_t>(k)].name;
  return out;
}

}  // namespace

std::vector<FeatureVector> CapabilityDataset::inputs() const {
  std::vector<FeatureVector> out;
  for (const auto& v : vectors) out.push_back(v.v);
  return out;
}

std::vector<double> CapabilityDataset::means() const {
  std::vector<double> out;
  for (const auto& v : vectors) out.push_back(v.mean);
  return out;
}

CapabilityDataset assemble_dataset(const DesignPlan& design, std::span<const CapabilityRecord> records, int bootstrap) {
  design.validate();
  const std::size_t m = design.vectors.size(), k = static_cast<std::size_t>(design.k);
  std::vector<std::vector<const CapabilityRecord*>> grid(m, std::vector<const CapabilityRecord*>(k, nullptr));
  CapabilityDataset ds;
  ds.space = design.space;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.i < 0 || static_cast<std::size_t>(rec.i) >= m || rec.j < 0 || static_cast<std::size_t>(rec.j) >= k)
      throw Error(ErrorCode::InvalidArgument,
                  "record (" + std::to_string(rec.i) + ", " + std::to_string(rec.j) + ") is outside the design");
    if (r == 0)
      ds.kind = rec.kind;
    else if (rec.kind != ds.kind)
      throw Error(ErrorCode::InvalidArgument, "records mix estimator kinds");
    auto& slot = grid[static_cast<std::size_t>(rec.i)][static_cast<std::size_t>(rec.j)];
    if (slot) throw Error(ErrorCode::InvalidArgument, "duplicate record (" + std::to_string(rec.i) + ", " + std::to_string(rec.j) + ")");
    slot = &rec;
  }
  std::vector<std::string> gaps;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (!grid[i][j]) gaps.push_back("(" + std::to_string(i) + ", " + std::to_string(j) + ")");
  if (!gaps.empty()) {
    std::string msg = std::to_string(gaps.size()) + " missing result(s):";
    for (std::size_t g = 0; g < gaps.size() && g < 20; ++g) msg += " " + gaps[g];
    if (gaps.size() > 20) msg += " ...";
    throw Error(ErrorCode::MissingData, msg);
  }

  for (std::size_t i = 0; i < m; ++i) {
    VectorSummary s;
    s.v = design.vectors[i];
    for (const auto* rec : grid[i]) s.estimates.push_back(rec->estimate);
    s.mean = std::accumulate(s.estimates.begin(), s.estimates.end(), 0.0) / static_cast<double>(k);
    const auto& first = grid[i][0]->std_error;
    const bool shared = first.has_value() &&
                        std::all_of(grid[i].begin(), grid[i].end(), [&](const auto* r) { return r->std_error == first; });
    if (shared) {
      s.std_error = *first;
    } else if (k == 1) {
      s.std_error = 0.0;
    } else {
      Rng rng = make_rng(design.seed, {kTagBootstrap, static_cast<std::uint64_t>(i)});
      s.std_error = bootstrap_stderr(s.estimates, bootstrap, rng);
    }
    ds.vectors.push_back(std::move(s));
  }
  return ds;
}

std::string dataset_csv(const CapabilityDataset& ds) {
  std::vector<std::string> header{"i"};
  for (const auto& a : ds.space.axes) header.push_back(a.name);
  header.insert(header.end(), {"mean", "stderr"});
  const std::size_t k = ds.vectors.empty() ? 0 : ds.vectors[0].estimates.size();
  for (std::size_t j = 0; j < k; ++j) header.push_back("s" + std::to_string(j));
  std::string out = csv::join(header) + "\n";
  for (std::size_t i = 0; i < ds.vectors.size(); ++i) {
    const auto& v = ds.vectors[i];
    std::vector<std::string> row{std::to_string(i)};
    for (double f : v.v) row.push_back(csv::format_double(f));
    row.push_back(csv::format_double(v.mean));
    row.push_back(csv::format_double(v.std_error));
    for (double e : v.estimates) row.push_back(csv::format_double(e));
    out += csv::join(row) + "\n";
  }
  return out;
}

SplitSpec split(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0 && fraction < 1)) throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  if (n_train == 0 || n_train >= n)
    throw Error(ErrorCode::InvalidArgument, "train fraction " + csv::format_double(fraction) + " of " + std::to_string(n) +
                                                " vectors leaves one side empty");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(seed, {kTagSplit});
  // Fisher-Yates with our own index draw so the partition does not depend on
  // the standard library's shuffle.
  for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[uniform_index(rng, i + 1)]);
  SplitSpec s;
  s.fraction = fraction;
  s.seed = seed;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

double delta_abs(std::span<const double> pred, std::span<const double> obs) {
  if (pred.size() != obs.size()) throw Error(ErrorCode::InvalidArgument, "prediction and observation counts differ");
  if (pred.empty()) throw Error(ErrorCode::InvalidArgument, "delta_abs needs at least one value");
  double s = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - obs[i]);
  return s / static_cast<double>(pred.size());
}

MonotonicityReport delta_v(const CapabilityDataset& ds, const std::vector<int>& features) {
  for (int f : features)
    if (f < 0 || f >= ds.space.dimension()) throw Error(ErrorCode::InvalidArgument, "feature index out of range");
  MonotonicityReport rep;
  rep.features = features;
  const auto& vs = ds.vectors;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    DeltaEntry e;
    e.index = static_cast<int>(i);
    e.delta = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < vs.size(); ++j) {
      if (!precedes(vs[j].v, vs[i].v, features)) continue;
      ++e.comparators;
      const double d = vs[j].mean - vs[i].mean;
      if (d < e.delta) {
        e.delta = d;
        e.argmin = static_cast<int>(j);
      }
    }
    if (e.comparators == 0) {
      ++rep.without_comparator;
      continue;
    }
    const auto& a = vs[static_cast<std::size_t>(e.argmin)];
    e.std_error = std::hypot(a.std_error, vs[i].std_error);
    rep.entries.push_back(e);
  }
  return rep;
}

std::vector<MonotonicityReport> delta_v_with_projections(const CapabilityDataset& ds) {
  const int d = ds.space.dimension();
  std::vector<int> all(static_cast<std::size_t>(d));
  std::iota(all.begin(), all.end(), 0);
  std::vector<MonotonicityReport> out{delta_v(ds, all)};
  if (d < 2) return out;
  for (int drop = 0; drop < d; ++drop) {
    std::vector<int> f;
    for (int k = 0; k < d; ++k)
      if (k != drop) f.push_back(k);
    out.push_back(delta_v(ds, f));
  }
  return out;
}

std::string monotonicity_csv(const CapabilityDataset& ds, const std::vector<MonotonicityReport>& reports) {
  std::vector<std::string> header{"subset", "i"};
  for (const auto& a : ds.space.axes) header.push_back(a.name);
  header.insert(header.end(), {"delta", "stderr", "comparators", "argmin"});
  std::string out = csv::join(header) + "\n";
  for (const auto& rep : reports) {
    const auto label = subset_label(ds.space, rep.features);
    for (const auto& e : rep.entries) {
      std::vector<std::string> row{label, std::to_string(e.index)};
      for (double f : ds.vectors[static_cast<std::size_t>(e.index)].v) row.push_back(csv::format_double(f));
      row.push_back(csv::format_double(e.delta));
      row.push_back(csv::format_double(e.std_error));
      row.push_back(std::to_string(e.comparators));
      row.push_back(std::to_string(e.argmin));
      out += csv::join(row) + "\n";
    }
  }
  return out;
}

std::vector<double> GridAxis::values(const FeatureSpace& space) const {
  if (feature < 0 || feature >= space.dimension()) throw Error(ErrorCode::InvalidArgument, "grid feature out of range");
  if (points < 1 || !(min <= max)) throw Error(ErrorCode::InvalidArgument, "grid axis needs min <= max and >= 1 point");
  const bool log = space.axes[static_cast<std::size_t>(feature)].scale == AxisScale::Log2;
  if (log && !(min > 0)) throw Error(ErrorCode::InvalidArgument, "log2 grid axis needs min > 0");
  std::vector<double> out;
  for (int p = 0; p < points; ++p) {
    const double u = points == 1 ? 0.0 : static_cast<double>(p) / (points - 1);
    out.push_back(log ? std::exp2(std::log2(min) + u * (std::log2(max) - std::log2(min))) : min + u * (max - min));
  }
  return out;
}

GridAxis parse_grid_axis(const FeatureSpace& space, std::string_view spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.emplace_back(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 4) throw Error(ErrorCode::InvalidArgument, "grid spec '" + std::string(spec) + "' is not name:min:max:points");
  const auto f = space.index_of(parts[0]);
  if (!f) throw Error(ErrorCode::InvalidArgument, "grid axis '" + parts[0] + "' is not a model feature");
  GridAxis g;
  g.feature = *f;
  try {
    g.min = csv::parse_double(parts[1], "grid min");
    g.max = csv::parse_double(parts[2], "grid max");
    g.points = static_cast<int>(csv::parse_int(parts[3], "grid points"));
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, e.what());
  }
  g.values(space);
  return g;
}

Heatmap continuous_volumetric_grid(const CapabilityModel& model, const GridAxis& rows, const GridAxis& cols,
                                   const FeatureVector& fixed) {
  const auto& space = model.space();
  if (rows.feature == cols.feature) throw Error(ErrorCode::InvalidArgument, "heatmap axes must be different features");
  if (fixed.size() != space.axes.size()) throw Error(ErrorCode::InvalidArgument, "fixed feature vector has the wrong dimension");
  Heatmap h;
  h.row_feature = rows.feature;
  h.col_feature = cols.feature;
  h.row_values = rows.values(space);
  h.col_values = cols.values(space);
  std::vector<FeatureVector> pts;
  for (double r : h.row_values)
    for (double c : h.col_values) {
      FeatureVector v = fixed;
      v[static_cast<std::size_t>(rows.feature)] = r;
      v[static_cast<std::size_t>(cols.feature)] = c;
      pts.push_back(std::move(v));
    }
  const auto pred = model.predict(pts);
  const auto nr = static_cast<Eigen::Index>(h.row_values.size()), nc = static_cast<Eigen::Index>(h.col_values.size());
  h.values.resize(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index c = 0; c < nc; ++c) h.values(r, c) = std::clamp(pred.mean[r * nc + c], 0.0, 1.0);
  return h;
}

Heatmap volumetric_heatmap(const CapabilityDataset& ds, int row_feature, int col_feature, const FeatureVector& fixed) {
  const int d = ds.space.dimension();
  if (row_feature < 0 || row_feature >= d || col_feature < 0 || col_feature >= d || row_feature == col_feature)
    throw Error(ErrorCode::InvalidArgument, "heatmap axes must be two different features of the dataset");
  if (fixed.size() != static_cast<std::size_t>(d)) throw Error(ErrorCode::InvalidArgument, "fixed feature vector has the wrong dimension");
  std::vector<const VectorSummary*> sel;
  for (const auto& v : ds.vectors) {
    bool match = true;
    for (int k = 0; k < d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (k != row_feature && k != col_feature && !std::isnan(fixed[kk]) && v.v[kk] != fixed[kk]) match = false;
    }
    if (match) sel.push_back(&v);
  }
  Heatmap h;
  h.row_feature = row_feature;
  h.col_feature = col_feature;
  for (const auto* v : sel) {
    h.row_values.push_back(v->v[static_cast<std::size_t>(row_feature)]);
    h.col_values.push_back(v->v[static_cast<std::size_t>(col_feature)]);
  }
  for (auto* vals : {&h.row_values, &h.col_values}) {
    std::sort(vals->begin(), vals->end());
    vals->erase(std::unique(vals->begin(), vals->end()), vals->end());
  }
  const auto nr = static_cast<Eigen::Index>(h.row_values.size()), nc = static_cast<Eigen::Index>(h.col_values.size());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(nr, nc), count = Eigen::MatrixXd::Zero(nr, nc);
  for (const auto* v : sel) {
    const auto r = std::lower_bound(h.row_values.begin(), h.row_values.end(), v->v[static_cast<std::size_t>(row_feature)]) -
                   h.row_values.begin();
    const auto c = std::lower_bound(h.col_values.begin(), h.col_values.end(), v->v[static_cast<std::size_t>(col_feature)]) -
                   h.col_values.begin();
    sum(r, c) += v->mean;
    count(r, c) += 1;
  }
  h.values = Eigen::MatrixXd::Constant(nr, nc, kNaN);
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index c = 0; c < nc; ++c)
      if (count(r, c) > 0) h.values(r, c) = sum(r, c) / count(r, c);
  return h;
}

std::string heatmap_csv(const Heatmap& h, const FeatureSpace& space) {
  // First row: corner label "<row>\<col>" then column values; then one row
  // per row value.
  const auto& rn = space.axes.at(static_cast<std::size_t>(h.row_feature)).name;
  const auto& cn = space.axes.at(static_cast<std::size_t>(h.col_feature)).name;
  std::vector<std::string> header{rn + "\\" + cn};
  for (double c : h.col_values) header.push_back(csv::format_double(c));
  std::string out = csv::join(header) + "\n";
  for (std::size_t r = 0; r < h.row_values.size(); ++r) {
    std::vector<std::string> row{csv::format_double(h.row_values[r])};
    for (std::size_t c = 0; c < h.col_values.size(); ++c) {
      const double v = h.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      row.push_back(std::isnan(v) ? "" : csv::format_double(v));
    }
    out += csv::join(row) + "\n";
  }
  return out;
}

SplitEvaluation evaluate_splits(const CapabilityDataset& ds, double fraction, int instances, std::uint64_t seed,
                                const CapabilityModelConfig& config) {
  if (instances < 1) throw Error(ErrorCode::InvalidArgument, "need at least one split instance");
  split(ds.vectors.size(), fraction, seed);  // validates the fraction up front
  SplitEvaluation out;
  out.delta_abs.assign(static_cast<std::size_t>(instances), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(instances));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < instances; ++r) {
    try {
      const auto ru = static_cast<std::uint64_t>(r);
      const auto s = split(ds.vectors.size(), fraction, derive_seed(seed, {kTagSplit, ru}));
      std::vector<FeatureVector> xtr, xte;
      std::vector<double> ytr, yte;
      for (int i : s.train) {
        xtr.push_back(ds.vectors[static_cast<std::size_t>(i)].v);
        ytr.push_back(ds.vectors[static_cast<std::size_t>(i)].mean);
      }
      for (int i : s.test) {
        xte.push_back(ds.vectors[static_cast<std::size_t>(i)].v);
        yte.push_back(ds.vectors[static_cast<std::size_t>(i)].mean);
      }
      auto cfg = config;
      cfg.optimizer.seed = derive_seed(seed, {kTagOptimizer, ru});
      const auto model = CapabilityModel::fit(ds.space, xtr, ytr, cfg);
      const auto pred = model.predict(xte);
      std::vector<double> p(pred.mean.data(), pred.mean.data() + pred.mean.size());
      for (auto& v : p) v = std::clamp(v, 0.0, 1.0);
      out.delta_abs[static_cast<std::size_t>(r)] = delta_abs(p, yte);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  const double n = instances;
  out.mean = std::accumulate(out.delta_abs.begin(), out.delta_abs.end(), 0.0) / n;
  double ss = 0;
  for (double v : out.delta_abs) ss += (v - out.mean) * (v - out.mean);
  out.sd = instances > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  return out;
}

}  // namespace fmb
