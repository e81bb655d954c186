#include "fmb/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_set>

#include "fmb/clifford.hpp"
#include "fmb/error.hpp"

namespace fmb {

Layer::Layer(std::vector<Gate> gates) : gates_(std::move(gates)) {
  std::unordered_set<Qubit> used;
  for (const auto& g : gates_) {
    if (g.kind == Gate::Kind::Clifford && (g.clifford < 0 || g.clifford >= CliffordTable::kSize))
      throw Error(ErrorCode::InvalidArgument, "Clifford index out of range: " + std::to_string(g.clifford));
    if (g.is_two_qubit() && g.qubits[0] == g.qubits[1])
      throw Error(ErrorCode::InvalidArgument, "CX with identical control and target");
    for (int k = 0; k < g.arity(); ++k) {
      if (!used.insert(g.qubits[k]).second)
        throw Error(ErrorCode::InvalidArgument, "qubit " + std::to_string(g.qubits[k]) + " used twice in one layer");
    }
  }
}

std::size_t Layer::two_qubit_count() const {
  return static_cast<std::size_t>(std::ranges::count_if(gates_, [](const Gate& g) { return g.is_two_qubit(); }));
}

bool Layer::covers_exactly(std::span<const Qubit> qubits) const {
  std::size_t touched = 0;
  for (const auto& g : gates_) {
    for (int k = 0; k < g.arity(); ++k) {
      if (std::ranges::find(qubits, g.qubits[k]) == qubits.end()) return false;
      ++touched;
    }
  }
  return touched == qubits.size();
}

Circuit::Circuit(std::vector<Qubit> qubits, std::vector<Layer> layers)
    : qubits_(std::move(qubits)), layers_(std::move(layers)) {
  std::unordered_set<Qubit> seen;
  for (auto q : qubits_) {
    if (q < 0 || !seen.insert(q).second)
      throw Error(ErrorCode::InvalidArgument, "qubit list must hold distinct non-negative labels");
  }
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (!layers_[k].covers_exactly(qubits_))
      throw Error(ErrorCode::InvalidArgument,
                  "layer " + std::to_string(k) + " does not act on every circuit qubit exactly once");
  }
}

int Circuit::position(Qubit q) const {
  auto it = std::ranges::find(qubits_, q);
  return it == qubits_.end() ? -1 : static_cast<int>(it - qubits_.begin());
}

Circuit Circuit::then(const Circuit& next) const {
  if (next.qubits_ != qubits_) throw Error(ErrorCode::InvalidArgument, "cannot concatenate circuits on different qubits");
  auto layers = layers_;
  layers.insert(layers.end(), next.layers_.begin(), next.layers_.end());
  return Circuit(qubits_, std::move(layers));
}

std::string serialize(const Circuit& c) {
  std::ostringstream out;
  out << "Q:";
  for (auto q : c.qubits()) out << ' ' << q;
  out << '\n';
  for (std::size_t k = 0; k < c.layers().size(); ++k) {
    out << 'L' << k << ':';
    const auto& gates = c.layers()[k].gates();
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const auto& g = gates[i];
      out << (i == 0 ? " " : "; ");
      if (g.is_two_qubit())
        out << "CX " << g.qubits[0] << ' ' << g.qubits[1];
      else
        out << 'C' << g.clifford << ' ' << g.qubits[0];
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  for (auto t : split(trim(s), ' ')) {
    t = trim(t);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

int to_int(std::string_view s, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  std::vector<Qubit> qubits;
  std::vector<Layer> layers;
  bool have_header = false;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing ':'");
    auto tag = trim(line.substr(0, colon));
    auto body = line.substr(colon + 1);
    if (tag == "Q") {
      if (have_header) throw Error(ErrorCode::ParseError, "duplicate Q: header");
      for (auto t : tokens(body)) qubits.push_back(to_int(t, line_no));
      have_header = true;
      continue;
    }
    if (!have_header) throw Error(ErrorCode::ParseError, "circuit text must start with a Q: header");
    if (tag.size() < 2 || tag.front() != 'L' || to_int(tag.substr(1), line_no) != static_cast<int>(layers.size()))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected L" +
                                             std::to_string(layers.size()));
    std::vector<Gate> gates;
    if (!trim(body).empty()) {
      for (auto part : split(body, ';')) {
        auto tok = tokens(part);
        if (tok.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty gate");
        if (tok[0] == "CX") {
          if (tok.size() != 3) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": CX needs 2 qubits");
          gates.push_back(Gate::cx(to_int(tok[1], line_no), to_int(tok[2], line_no)));
        } else if (tok[0].size() > 1 && tok[0][0] == 'C') {
          if (tok.size() != 2) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": C<i> needs 1 qubit");
          int idx = to_int(tok[0].substr(1), line_no);
          if (idx < 0 || idx >= CliffordTable::kSize)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown gate " + std::string(tok[0]));
          gates.push_back(Gate::single(idx, to_int(tok[1], line_no)));
        } else {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown gate " + std::string(tok[0]));
        }
      }
    }
    try {
      layers.emplace_back(std::move(gates));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "circuit text must start with a Q: header");
  try {
    return Circuit(std::move(qubits), std::move(layers));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Layer invert_layer(const Layer& layer) {
  const auto& table = CliffordTable::instance();
  std::vector<Gate> gates = layer.gates();
  for (auto& g : gates) {
    if (!g.is_two_qubit()) g.clifford = table.inverse(g.clifford);
  }
  return Layer(std::move(gates));
}

ConnectivityGraph::ConnectivityGraph(std::vector<Qubit> vertices, std::vector<std::pair<Qubit, Qubit>> edges)
    : vertices_(std::move(vertices)) {
  std::ranges::sort(vertices_);
  if (std::ranges::adjacent_find(vertices_) != vertices_.end())
    throw Error(ErrorCode::InvalidArgument, "duplicate vertex in connectivity graph");
  for (auto [a, b] : edges) {
    if (a == b) throw Error(ErrorCode::InvalidArgument, "self-loop on qubit " + std::to_string(a));
    if (!has_vertex(a) || !has_vertex(b))
      throw Error(ErrorCode::InvalidArgument, "edge references unknown qubit");
    edges_.insert(std::minmax(a, b));
  }
}

ConnectivityGraph ConnectivityGraph::line(int n) {
  std::vector<Qubit> v(n);
  std::vector<std::pair<Qubit, Qubit>> e;
  for (int i = 0; i < n; ++i) v[i] = i;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return ConnectivityGraph(std::move(v), std::move(e));
}

ConnectivityGraph ConnectivityGraph::all_to_all(int n) {
  std::vector<Qubit> v(n);
  std::vector<std::pair<Qubit, Qubit>> e;
  for (int i = 0; i < n; ++i) {
    v[i] = i;
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return ConnectivityGraph(std::move(v), std::move(e));
}

bool ConnectivityGraph::has_vertex(Qubit q) const { return std::ranges::binary_search(vertices_, q); }

bool ConnectivityGraph::has_edge(Qubit a, Qubit b) const { return edges_.contains(std::minmax(a, b)); }

std::vector<std::pair<Qubit, Qubit>> ConnectivityGraph::induced_edges(std::span<const Qubit> subset) const {
  std::vector<std::pair<Qubit, Qubit>> out;
  for (const auto& e : edges_) {
    if (std::ranges::find(subset, e.first) != subset.end() && std::ranges::find(subset, e.second) != subset.end())
      out.push_back(e);
  }
  return out;
}

FeatureValues compute_features(const Circuit& c, std::span<const Qubit> system_qubits, std::optional<int> depth_override) {
  const int d = depth_override.value_or(c.depth());
  if (d <= 0 || c.depth() == 0) throw Error(ErrorCode::DegenerateCircuit, "depth-0 circuit has undefined densities");
  FeatureValues f;
  f.w = c.width();
  f.d = d;
  for (const auto& layer : c.layers()) {
    for (const auto& g : layer.gates()) {
      if (g.is_two_qubit())
        ++f.n2q;
      else if (!g.is_identity())
        ++f.n1q;
    }
  }
  const double volume = static_cast<double>(f.w) * static_cast<double>(d);
  f.xi2q = 2.0 * f.n2q / volume;
  f.xi1q = f.n1q / volume;
  f.active.reserve(system_qubits.size());
  for (auto q : system_qubits) f.active.push_back(c.position(q) >= 0);
  return f;
}

}  // namespace fmb
