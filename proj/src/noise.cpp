#include "fmb/noise.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "fmb/csv.hpp"
#include "fmb/error.hpp"

namespace fmb {
namespace {

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, what + " must lie in [0,1]");
}

constexpr std::array<const char*, 9> kQubitHeader = {
    "qubit", "T1 (us)", "T2 (us)", "frequency (GHz)", "anharmonicity (GHz)", "readout error",
    "Pr(prep 1, measure 0)", "Pr(prep 0, measure 1)", "readout length (ns)"};
constexpr std::array<const char*, 6> kGateHeader = {"qubit",  "Single Qubit Error (%)", "Gate Length (ns)",
                                                    "qubits", "Two Qubit Error (%)",    "Gate Length (ns)"};

Qubit parse_label(std::string_view s, const std::string& where) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.size() < 2 || s.front() != 'Q') throw Error(ErrorCode::ParseError, where + ": bad qubit label '" + std::string(s) + "'");
  return static_cast<Qubit>(csv::parse_int(s.substr(1), where));
}

std::pair<Qubit, Qubit> parse_pair(std::string_view s, const std::string& where) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw Error(ErrorCode::ParseError, where + ": bad qubit pair '" + std::string(s) + "'");
  s = s.substr(1, s.size() - 2);
  auto comma = s.find(',');
  if (comma == std::string_view::npos) throw Error(ErrorCode::ParseError, where + ": bad qubit pair");
  return {parse_label(s.substr(0, comma), where), parse_label(s.substr(comma + 1), where)};
}

template <std::size_t N>
void expect_header(const std::vector<std::string>& fields, const std::array<const char*, N>& expected,
                   const std::string& where) {
  for (std::size_t i = 0; i < N; ++i) {
    if (i >= fields.size()) throw Error(ErrorCode::ParseError, where + ": missing column '" + expected[i] + "'");
    if (fields[i] != expected[i])
      throw Error(ErrorCode::ParseError, where + ": column " + std::to_string(i + 1) + " is '" + fields[i] +
                                             "', expected '" + expected[i] + "'");
  }
}

double non_negative(std::string_view s, const std::string& where) {
  double v = csv::parse_double(s, where);
  if (v < 0) throw Error(ErrorCode::ParseError, where + ": negative value");
  return v;
}

}  // namespace

void NoiseModel::set_single(Qubit q, double p) {
  check_probability(p, "single-qubit error rate");
  single_[q] = p;
}

void NoiseModel::set_pair(Qubit a, Qubit b, double p) {
  check_probability(p, "two-qubit error rate");
  if (a == b) throw Error(ErrorCode::InvalidArgument, "two-qubit rate on a single qubit");
  pair_[std::minmax(a, b)] = p;
}

void NoiseModel::set_readout(Qubit q, ReadoutError r) {
  check_probability(r.p0_to_1, "Pr(prep 0, measure 1)");
  check_probability(r.p1_to_0, "Pr(prep 1, measure 0)");
  readout_[q] = r;
}

double NoiseModel::single_rate(Qubit q) const {
  auto it = single_.find(q);
  if (it == single_.end()) throw Error(ErrorCode::IncompleteNoiseModel, "no single-qubit rate for qubit " + std::to_string(q));
  return it->second;
}

double NoiseModel::pair_rate(Qubit a, Qubit b) const {
  auto it = pair_.find(std::minmax(a, b));
  if (it == pair_.end())
    throw Error(ErrorCode::IncompleteNoiseModel,
                "no two-qubit rate for pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  return it->second;
}

ReadoutError NoiseModel::readout(Qubit q) const {
  auto it = readout_.find(q);
  if (it == readout_.end()) throw Error(ErrorCode::IncompleteNoiseModel, "no readout error for qubit " + std::to_string(q));
  return it->second;
}

ConnectivityGraph NoiseModel::connectivity() const {
  std::set<Qubit> vertices;
  for (const auto& [q, _] : single_) vertices.insert(q);
  for (const auto& [q, _] : readout_) vertices.insert(q);
  std::vector<std::pair<Qubit, Qubit>> edges;
  for (const auto& [e, _] : pair_) {
    vertices.insert(e.first);
    vertices.insert(e.second);
    edges.push_back(e);
  }
  return ConnectivityGraph({vertices.begin(), vertices.end()}, std::move(edges));
}

NoiseModel NoiseModel::uniform(std::span<const Qubit> qubits, double e1, double e2, ReadoutError ro) {
  NoiseModel m;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    m.set_single(qubits[i], e1);
    m.set_readout(qubits[i], ro);
    for (std::size_t j = i + 1; j < qubits.size(); ++j) m.set_pair(qubits[i], qubits[j], e2);
  }
  return m;
}

CalibrationTable parse_calibration(std::string_view text) {
  enum class Section { None, Qubits, Gates } section = Section::None;
  CalibrationTable table;
  std::set<Qubit> seen_qubits, seen_single;
  std::set<std::pair<Qubit, Qubit>> seen_pairs;
  bool have_gate_table = false, have_pair_columns = false;
  int line_no = 0;
  for (const auto& line : csv::lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "calibration line " + std::to_string(line_no);
    auto f = csv::split_record(line);
    if (f.size() > 1 && f[0] == "qubit" && f[1] == kQubitHeader[1]) {
      expect_header(f, kQubitHeader, where);
      section = Section::Qubits;
      continue;
    }
    if (f.size() > 1 && f[0] == "qubit" && f[1] == kGateHeader[1]) {
      if (f.size() < kGateHeader.size())
        throw Error(ErrorCode::IncompleteNoiseModel, where + ": gate table lacks the two-qubit columns");
      expect_header(f, kGateHeader, where);
      section = Section::Gates;
      have_gate_table = true;
      have_pair_columns = true;
      continue;
    }
    if (section == Section::None) throw Error(ErrorCode::ParseError, where + ": data before any table header");
    if (section == Section::Qubits) {
      if (f.size() != kQubitHeader.size())
        throw Error(ErrorCode::ParseError, where + ": expected " + std::to_string(kQubitHeader.size()) + " columns");
      QubitCalibration q;
      q.qubit = parse_label(f[0], where);
      if (!seen_qubits.insert(q.qubit).second)
        throw Error(ErrorCode::ParseError, where + ": duplicate qubit Q" + std::to_string(q.qubit));
      q.t1_us = csv::parse_double(f[1], where);
      q.t2_us = csv::parse_double(f[2], where);
      q.frequency_ghz = csv::parse_double(f[3], where);
      q.anharmonicity_ghz = csv::parse_double(f[4], where);
      q.readout_error = non_negative(f[5], where);
      q.p1_to_0 = non_negative(f[6], where);
      q.p0_to_1 = non_negative(f[7], where);
      q.readout_length_ns = csv::parse_double(f[8], where);
      table.qubits.push_back(q);
    } else {
      if (f.size() != kGateHeader.size())
        throw Error(ErrorCode::ParseError, where + ": expected " + std::to_string(kGateHeader.size()) + " columns");
      if (!f[0].empty()) {
        SingleQubitGateCalibration s;
        s.qubit = parse_label(f[0], where);
        if (!seen_single.insert(s.qubit).second)
          throw Error(ErrorCode::ParseError, where + ": duplicate qubit Q" + std::to_string(s.qubit));
        s.error_percent = non_negative(f[1], where);
        s.gate_length_ns = csv::parse_double(f[2], where);
        table.single.push_back(s);
      }
      if (!f[3].empty()) {
        TwoQubitGateCalibration t;
        std::tie(t.a, t.b) = parse_pair(f[3], where);
        if (!seen_pairs.insert(std::minmax(t.a, t.b)).second)
          throw Error(ErrorCode::ParseError, where + ": duplicate qubit pair");
        t.error_percent = non_negative(f[4], where);
        t.gate_length_ns = csv::parse_double(f[5], where);
        table.pairs.push_back(t);
      }
    }
  }
  if (table.qubits.empty()) throw Error(ErrorCode::IncompleteNoiseModel, "calibration has no qubit property table");
  if (!have_gate_table || !have_pair_columns || table.pairs.empty())
    throw Error(ErrorCode::IncompleteNoiseModel, "calibration has no two-qubit gate section");
  return table;
}

std::string format_calibration(const CalibrationTable& table) {
  std::string out = "# qubit properties\n";
  out += csv::join({kQubitHeader.begin(), kQubitHeader.end()}) + "\n";
  for (const auto& q : table.qubits) {
    out += csv::join({"Q" + std::to_string(q.qubit), csv::format_double(q.t1_us), csv::format_double(q.t2_us),
                      csv::format_double(q.frequency_ghz), csv::format_double(q.anharmonicity_ghz),
                      csv::format_double(q.readout_error), csv::format_double(q.p1_to_0),
                      csv::format_double(q.p0_to_1), csv::format_double(q.readout_length_ns)}) +
           "\n";
  }
  out += "# gate errors\n";
  out += csv::join({kGateHeader.begin(), kGateHeader.end()}) + "\n";
  const std::size_t rows = std::max(table.single.size(), table.pairs.size());
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::string> f(6);
    if (i < table.single.size()) {
      f[0] = "Q" + std::to_string(table.single[i].qubit);
      f[1] = csv::format_double(table.single[i].error_percent);
      f[2] = csv::format_double(table.single[i].gate_length_ns);
    }
    if (i < table.pairs.size()) {
      f[3] = "(Q" + std::to_string(table.pairs[i].a) + ", Q" + std::to_string(table.pairs[i].b) + ")";
      f[4] = csv::format_double(table.pairs[i].error_percent);
      f[5] = csv::format_double(table.pairs[i].gate_length_ns);
    }
    out += csv::join(f) + "\n";
  }
  return out;
}

NoiseModel noise_model_from(const CalibrationTable& table, ErrorRateConvention convention) {
  const double scale1 = convention == ErrorRateConvention::Depolarizing ? 3.0 / 2.0 : 1.0;
  const double scale2 = convention == ErrorRateConvention::Depolarizing ? 5.0 / 4.0 : 1.0;
  NoiseModel m;
  for (const auto& q : table.qubits) m.set_readout(q.qubit, {q.p0_to_1, q.p1_to_0});
  for (const auto& s : table.single) m.set_single(s.qubit, std::min(1.0, scale1 * s.error_percent / 100.0));
  for (const auto& t : table.pairs) m.set_pair(t.a, t.b, std::min(1.0, scale2 * t.error_percent / 100.0));
  return m;
}

NoiseModel ingest_calibration(const std::string& path, ErrorRateConvention convention) {
  return noise_model_from(parse_calibration(csv::read_file(path)), convention);
}

}  // namespace fmb
