#include "fmb/design.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "fmb/csv.hpp"
#include "fmb/error.hpp"
#include "fmb/sobol.hpp"

namespace fmb {
namespace {

using nlohmann::json;

constexpr double kTol = 1e-12;

std::string_view method_name(DesignMethod m) { return m == DesignMethod::Sobol ? "sobol" : "grid"; }

}  // namespace

std::string_view to_string(AxisScale s) { return s == AxisScale::Log2 ? "log2" : "linear"; }

AxisScale axis_scale_from_string(std::string_view s) {
  if (s == "log2") return AxisScale::Log2;
  if (s == "linear" || s == "lin") return AxisScale::Linear;
  throw Error(ErrorCode::InvalidArgument, "unknown axis scale '" + std::string(s) + "'");
}

void FeatureAxis::validate() const {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "axis needs a name");
  if (!std::isfinite(min) || !std::isfinite(max) || min > max)
    throw Error(ErrorCode::InvalidArgument, "axis '" + name + "' needs finite min <= max");
  if (scale == AxisScale::Log2 && min <= 0) throw Error(ErrorCode::InvalidArgument, "log2 axis '" + name + "' needs min > 0");
}

bool FeatureAxis::contains(double v) const {
  if (v < min - kTol || v > max + kTol) return false;
  return !integer_valued || v == std::floor(v);
}

double FeatureAxis::from_unit(double u) const {
  double v = scale == AxisScale::Log2 ? std::exp2(std::log2(min) + u * (std::log2(max) - std::log2(min)))
                                      : min + u * (max - min);
  if (integer_valued) v = std::floor(v + 0.5);
  return std::clamp(v, integer_valued ? std::ceil(min) : min, integer_valued ? std::floor(max) : max);
}

FeatureAxis parse_axis(std::string_view spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = spec.find(':', start);
    parts.emplace_back(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 5) throw Error(ErrorCode::InvalidArgument, "axis spec '" + std::string(spec) + "' is not name:scale:type:min:max");
  FeatureAxis a;
  a.name = parts[0];
  a.scale = axis_scale_from_string(parts[1]);
  if (parts[2] == "int")
    a.integer_valued = true;
  else if (parts[2] != "real")
    throw Error(ErrorCode::InvalidArgument, "axis type must be int or real, got '" + parts[2] + "'");
  try {
    a.min = csv::parse_double(parts[3], "axis min");
    a.max = csv::parse_double(parts[4], "axis max");
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, e.what());
  }
  a.validate();
  return a;
}

void FeatureSpace::validate() const {
  if (axes.empty()) throw Error(ErrorCode::InvalidArgument, "feature space needs at least one axis");
  std::set<std::string> names;
  for (const auto& a : axes) {
    a.validate();
    if (!names.insert(a.name).second) throw Error(ErrorCode::InvalidArgument, "duplicate axis name '" + a.name + "'");
  }
}

std::optional<int> FeatureSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (axes[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

void DesignPlan::validate() const {
  space.validate();
  if (vectors.empty()) throw Error(ErrorCode::EmptyDesign, "design has no vectors");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != space.axes.size())
      throw Error(ErrorCode::InvalidArgument, "vector " + std::to_string(i) + " has the wrong dimension");
    for (std::size_t d = 0; d < vectors[i].size(); ++d)
      if (!space.axes[d].contains(vectors[i][d]))
        throw Error(ErrorCode::InvalidArgument, "vector " + std::to_string(i) + " lies outside axis '" + space.axes[d].name + "'");
  }
}

DesignPlan grid_design(const FeatureSpace& space, const std::vector<std::vector<double>>& values, const Exclusion& exclude,
                       int k, std::uint64_t seed) {
  space.validate();
  if (values.size() != space.axes.size()) throw Error(ErrorCode::InvalidArgument, "need one value list per axis");
  for (std::size_t d = 0; d < values.size(); ++d) {
    std::set<double> seen;
    for (double v : values[d]) {
      if (!space.axes[d].contains(v))
        throw Error(ErrorCode::InvalidArgument, "value " + csv::format_double(v) + " is not on axis '" + space.axes[d].name + "'");
      if (!seen.insert(v).second)
        throw Error(ErrorCode::InvalidArgument, "duplicate value on axis '" + space.axes[d].name + "'");
    }
  }
  DesignPlan plan;
  plan.space = space;
  plan.k = k;
  plan.seed = seed;
  plan.method = DesignMethod::Grid;
  bool any_empty = false;
  for (const auto& v : values) any_empty = any_empty || v.empty();
  if (!any_empty) {
    std::vector<std::size_t> idx(values.size(), 0);
    while (true) {
      FeatureVector v(values.size());
      for (std::size_t d = 0; d < values.size(); ++d) v[d] = values[d][idx[d]];
      if (!exclude || !exclude(v)) plan.vectors.push_back(std::move(v));
      std::size_t d = values.size();
      while (d > 0 && ++idx[d - 1] == values[d - 1].size()) {
        idx[d - 1] = 0;
        --d;
      }
      if (d == 0) break;
    }
  }
  if (plan.vectors.empty()) throw Error(ErrorCode::EmptyDesign, "grid design is empty after exclusions");
  plan.validate();
  return plan;
}

DesignPlan sobol_design(const FeatureSpace& space, int m, int k, std::uint64_t seed) {
  space.validate();
  if (m < 1) throw Error(ErrorCode::EmptyDesign, "Sobol design needs M >= 1");
  SobolSequence seq(space.dimension());
  seq.skip(1);
  DesignPlan plan;
  plan.space = space;
  plan.k = k;
  plan.seed = seed;
  plan.method = DesignMethod::Sobol;
  plan.vectors.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto u = seq.next();
    FeatureVector v(u.size());
    for (std::size_t d = 0; d < u.size(); ++d) v[d] = space.axes[d].from_unit(u[d]);
    plan.vectors.push_back(std::move(v));
  }
  plan.validate();
  return plan;
}

std::vector<double> default_grid_values(const FeatureAxis& axis) {
  axis.validate();
  if (!axis.integer_valued)
    throw Error(ErrorCode::InvalidArgument, "real axis '" + axis.name + "' needs explicit grid values");
  std::vector<double> out;
  if (axis.scale == AxisScale::Log2) {
    for (double v = 1; v <= axis.max; v *= 2)
      if (v >= axis.min) out.push_back(v);
  } else {
    for (double v = std::ceil(axis.min); v <= axis.max; v += 1) out.push_back(v);
  }
  return out;
}

std::string design_to_json(const DesignPlan& plan) {
  json axes = json::array();
  for (const auto& a : plan.space.axes)
    axes.push_back({{"name", a.name}, {"scale", to_string(a.scale)}, {"min", a.min}, {"max", a.max}, {"integer", a.integer_valued}});
  json doc = {{"method", method_name(plan.method)},
              {"seed", plan.seed},
              {"k", plan.k},
              {"m", plan.vectors.size()},
              {"axes", axes},
              {"vectors", plan.vectors}};
  return doc.dump(1) + "\n";
}

DesignPlan design_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    DesignPlan plan;
    const auto method = doc.at("method").get<std::string>();
    if (method == "grid")
      plan.method = DesignMethod::Grid;
    else if (method == "sobol")
      plan.method = DesignMethod::Sobol;
    else
      throw Error(ErrorCode::ParseError, "unknown design method '" + method + "'");
    plan.seed = doc.at("seed").get<std::uint64_t>();
    plan.k = doc.at("k").get<int>();
    for (const auto& a : doc.at("axes")) {
      FeatureAxis axis;
      axis.name = a.at("name").get<std::string>();
      axis.scale = axis_scale_from_string(a.at("scale").get<std::string>());
      axis.min = a.at("min").get<double>();
      axis.max = a.at("max").get<double>();
      axis.integer_valued = a.at("integer").get<bool>();
      plan.space.axes.push_back(axis);
    }
    plan.vectors = doc.at("vectors").get<std::vector<FeatureVector>>();
    if (doc.at("m").get<std::size_t>() != plan.vectors.size())
      throw Error(ErrorCode::ParseError, "design vector count disagrees with its m field");
    plan.validate();
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("design file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, std::string("design file: ") + e.what());
  }
}

DesignPlan algiers_preset(std::uint64_t seed) {
  FeatureSpace space{{{"w", AxisScale::Linear, 2, 27, true},
                      {"d", AxisScale::Log2, 4, 1024, true},
                      {"xi", AxisScale::Linear, 0, 0.25, false}}};
  std::vector<std::vector<double>> values{default_grid_values(space.axes[0]), default_grid_values(space.axes[1]),
                                          {0.0, 0.125, 0.25}};
  return grid_design(space, values, [](const FeatureVector& v) { return v[0] * v[1] > 3584; }, 10, seed);
}

DesignPlan forte_preset(std::uint64_t seed) {
  FeatureSpace space{{{"w", AxisScale::Log2, 2, 20, true},
                      {"d", AxisScale::Log2, 2, 128, true},
                      {"xi", AxisScale::Linear, 0, 0.5, false}}};
  return sobol_design(space, 256, 30, seed);
}

}  // namespace fmb
