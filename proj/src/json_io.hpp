#pragma once

// nlohmann_json helpers shared by the model and pipeline files.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fmb/design.hpp"

namespace fmb::json_io {

using nlohmann::json;

inline json space_to_json(const FeatureSpace& space) {
  json axes = json::array();
  for (const auto& a : space.axes)
    axes.push_back({{"name", a.name}, {"scale", to_string(a.scale)}, {"min", a.min}, {"max", a.max}, {"integer", a.integer_valued}});
  return axes;
}

inline FeatureSpace space_from_json(const json& axes) {
  FeatureSpace space;
  for (const auto& a : axes)
    space.axes.push_back({a.at("name").get<std::string>(), axis_scale_from_string(a.at("scale").get<std::string>()),
                          a.at("min").get<double>(), a.at("max").get<double>(), a.at("integer").get<bool>()});
  space.validate();
  return space;
}

inline json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = j[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) throw std::invalid_argument("matrix row has the wrong length");
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

}  // namespace fmb::json_io
