#include "fmb/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "fmb/clifford.hpp"
#include "fmb/error.hpp"

namespace fmb {
namespace {

void check_density(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw Error(ErrorCode::InvalidArgument, "two-qubit density must lie in [0,1]");
}

Gate random_cx(Qubit a, Qubit b, Rng& rng) { return (rng() & 1U) ? Gate::cx(a, b) : Gate::cx(b, a); }

Gate random_clifford(Qubit q, Rng& rng) {
  return Gate::single(static_cast<int>(uniform_index(rng, CliffordTable::kSize)), q);
}

Layer random_pauli_layer(std::span<const Qubit> q, Rng& rng) {
  std::vector<Gate> gates;
  for (auto qb : q) gates.push_back(Gate::single(kPauliGates[uniform_index(rng, 4)], qb));
  return Layer(std::move(gates));
}

Layer random_clifford_layer(std::span<const Qubit> q, Rng& rng) {
  std::vector<Gate> gates;
  for (auto qb : q) gates.push_back(random_clifford(qb, rng));
  return Layer(std::move(gates));
}

}  // namespace

std::vector<Qubit> QubitChoice::select(const ConnectivityGraph& g, int w) const {
  if (w < 1) throw Error(ErrorCode::InvalidArgument, "circuit width must be at least 1");
  if (explicit_qubits) {
    if (static_cast<int>(explicit_qubits->size()) < w)
      throw Error(ErrorCode::InvalidArgument, "width " + std::to_string(w) + " exceeds the chosen qubit set");
    std::vector<Qubit> q(explicit_qubits->begin(), explicit_qubits->begin() + w);
    for (auto qb : q)
      if (!g.has_vertex(qb)) throw Error(ErrorCode::InvalidArgument, "qubit " + std::to_string(qb) + " is not on the device");
    return q;
  }
  if (static_cast<int>(g.vertices().size()) < w)
    throw Error(ErrorCode::InvalidArgument, "width " + std::to_string(w) + " exceeds the device size");
  return {g.vertices().begin(), g.vertices().begin() + w};
}

Layer sample_edgegrab_layer(const ConnectivityGraph& g, std::span<const Qubit> q, double xi, Rng& rng) {
  check_density(xi);
  std::vector<Gate> gates;
  std::vector<Qubit> free(q.begin(), q.end());
  if (xi > 0.0) {
    auto edges = g.induced_edges(q);
    if (edges.empty()) throw Error(ErrorCode::NoEdges, "no connected pair among the selected qubits");
    std::shuffle(edges.begin(), edges.end(), rng);
    std::vector<std::pair<Qubit, Qubit>> matching;
    std::vector<Qubit> used;
    for (const auto& [a, b] : edges) {
      if (std::ranges::find(used, a) != used.end() || std::ranges::find(used, b) != used.end()) continue;
      used.push_back(a);
      used.push_back(b);
      matching.emplace_back(a, b);
    }
    const double p = std::min(1.0, static_cast<double>(q.size()) * xi / static_cast<double>(matching.size()));
    std::bernoulli_distribution keep(p);
    for (const auto& [a, b] : matching) {
      if (!keep(rng)) continue;
      gates.push_back(random_cx(a, b, rng));
      std::erase(free, a);
      std::erase(free, b);
    }
  }
  for (auto qb : free) gates.push_back(random_clifford(qb, rng));
  return Layer(std::move(gates));
}

Circuit sample_mirror_circuit(int w, int d, double xi, const MirrorSamplerConfig& config, Rng& rng) {
  if (d < 4 || d % 4 != 0) throw Error(ErrorCode::BadBenchmarkDepth, "benchmark depth must be a positive multiple of 4, got " + std::to_string(d));
  check_density(xi);
  const auto q = config.qubits.select(config.connectivity, w);
  std::vector<Layer> sampled;
  for (int i = 0; i < d / 4; ++i) sampled.push_back(sample_edgegrab_layer(config.connectivity, q, xi, rng));
  std::vector<Layer> main = sampled;
  for (auto it = sampled.rbegin(); it != sampled.rend(); ++it) main.push_back(invert_layer(*it));

  const auto cap = random_clifford_layer(q, rng);
  std::vector<Layer> layers{cap};
  for (const auto& m : main) {
    layers.push_back(random_pauli_layer(q, rng));
    layers.push_back(m);
  }
  layers.push_back(random_pauli_layer(q, rng));
  layers.push_back(invert_layer(cap));
  return Circuit(q, std::move(layers));
}

int fixed_density_cx_count(int w, int d, double xi) {
  return static_cast<int>(std::floor(static_cast<double>(w) * d * xi / 2.0 + 0.5));
}

Circuit sample_fixed_density_circuit(int w, int d, double xi, const FixedDensitySamplerConfig& config, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "depth must be at least 1");
  check_density(xi);
  const auto q = config.qubits.select(config.connectivity, w);
  const int n2q = fixed_density_cx_count(w, d, xi);
  if (n2q > d * (w / 2))
    throw Error(ErrorCode::DensityInfeasible, std::to_string(n2q) + " CX gates exceed the capacity of a " + std::to_string(w) +
                                                  "x" + std::to_string(d) + " circuit");
  const auto edges = config.connectivity.induced_edges(q);
  if (n2q > 0 && edges.empty()) throw Error(ErrorCode::NoEdges, "no connected pair among the selected qubits");

  std::vector<std::pair<int, std::size_t>> slots;  // (layer, edge)
  for (int l = 0; l < d; ++l)
    for (std::size_t e = 0; e < edges.size(); ++e) slots.emplace_back(l, e);

  std::vector<std::vector<std::size_t>> chosen;
  bool placed = n2q == 0;
  for (int attempt = 0; attempt < config.max_retries && !placed; ++attempt) {
    std::shuffle(slots.begin(), slots.end(), rng);
    chosen.assign(static_cast<std::size_t>(d), {});
    std::vector<std::vector<Qubit>> busy(static_cast<std::size_t>(d));
    int count = 0;
    for (const auto& [l, e] : slots) {
      if (count == n2q) break;
      auto& b = busy[static_cast<std::size_t>(l)];
      const auto [a, c] = edges[e];
      if (std::ranges::find(b, a) != b.end() || std::ranges::find(b, c) != b.end()) continue;
      b.push_back(a);
      b.push_back(c);
      chosen[static_cast<std::size_t>(l)].push_back(e);
      ++count;
    }
    placed = count == n2q;
  }
  if (!placed)
    throw Error(ErrorCode::DensityInfeasible, "could not place " + std::to_string(n2q) + " CX gates after " +
                                                  std::to_string(config.max_retries) + " attempts");
  chosen.resize(static_cast<std::size_t>(d));

  std::vector<Layer> layers;
  for (int l = 0; l < d; ++l) {
    std::vector<Gate> gates;
    std::vector<Qubit> free = q;
    for (auto e : chosen[static_cast<std::size_t>(l)]) {
      const auto [a, b] = edges[e];
      gates.push_back(random_cx(a, b, rng));
      std::erase(free, a);
      std::erase(free, b);
    }
    for (auto qb : free) gates.push_back(random_clifford(qb, rng));
    layers.emplace_back(std::move(gates));
  }
  return Circuit(q, std::move(layers));
}

}  // namespace fmb
