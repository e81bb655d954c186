#include "fmb/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "fmb/clifford.hpp"
#include "fmb/error.hpp"

namespace fmb {
namespace {

int pauli_slot(PauliBits p) { return p.x && p.z ? 1 : (p.x ? 0 : 2); }  // X, Y, Z

struct PauliChoices {
  // prep[k]: Cliffords C with C Z C^dagger = +P_k
  std::array<std::vector<int>, 3> prep;
  // measure[k]: Cliffords C with C P_k C^dagger = +-Z
  std::array<std::vector<int>, 3> measure;
};

const PauliChoices& choices() {
  static const PauliChoices table = [] {
    PauliChoices t;
    const auto& cl = CliffordTable::instance();
    const PauliBits paulis[3] = {{true, false}, {true, true}, {false, true}};
    for (int c = 0; c < CliffordTable::kSize; ++c) {
      const auto zi = cl.conjugate(c, {false, true});
      if (!zi.negate) t.prep[static_cast<std::size_t>(pauli_slot(zi.pauli))].push_back(c);
      for (int k = 0; k < 3; ++k) {
        const auto img = cl.conjugate(c, paulis[k]);
        if (!img.pauli.x && img.pauli.z) t.measure[static_cast<std::size_t>(k)].push_back(c);
      }
    }
    return t;
  }();
  return table;
}

int pick(const std::vector<int>& options, Rng& rng) { return options[uniform_index(rng, options.size())]; }

int random_clifford_index(Rng& rng) { return static_cast<int>(uniform_index(rng, CliffordTable::kSize)); }

Layer measurement_layer(const Circuit& c, const PauliOperator& p, Rng& rng) {
  std::vector<Gate> gates;
  for (int q = 0; q < c.width(); ++q) {
    const auto f = p.at(q);
    const int g = (f.x || f.z) ? pick(choices().measure[static_cast<std::size_t>(pauli_slot(f))], rng) : random_clifford_index(rng);
    gates.push_back(Gate::single(g, c.qubits()[static_cast<std::size_t>(q)]));
  }
  return Layer(std::move(gates));
}

PauliOperator through_layer(const Circuit& c, const Layer& layer, const PauliOperator& p) {
  return conjugate_pauli(Circuit(c.qubits(), {layer}), p);
}

void check_n(std::uint64_t n, const Counts& counts) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "shot count N must be at least 1");
  if (total_shots(counts) != n) throw Error(ErrorCode::InvalidArgument, "counts do not sum to N");
}

void check_qubits(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "qubit count must be at least 1");
}

}  // namespace

std::string_view to_string(EstimatorKind k) { return k == EstimatorKind::Srdfe ? "srdfe" : "success_prob"; }

EstimatorKind estimator_from_string(std::string_view s) {
  if (s == "srdfe") return EstimatorKind::Srdfe;
  if (s == "success_prob" || s == "success") return EstimatorKind::SuccessProbability;
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + std::string(s) + "'");
}

double CapabilityRecord::clamped() const { return std::clamp(estimate, 0.0, 1.0); }

double estimate_success_probability(const Counts& counts, std::string_view target, std::uint64_t n) {
  check_n(n, counts);
  auto it = counts.find(std::string(target));
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
}

bool in_plus_eigenspace(std::string_view bits, const PauliOperator& p3) {
  if (!p3.is_z_type()) throw Error(ErrorCode::InvalidArgument, "P3 must contain only I and Z factors");
  if (static_cast<int>(bits.size()) != p3.size()) throw Error(ErrorCode::InvalidArgument, "bit string width differs from P3");
  bool odd = false;
  for (int q = 0; q < p3.size(); ++q)
    if (p3.at(q).z && bits[static_cast<std::size_t>(q)] == '1') odd = !odd;
  return (p3.sign() < 0) == odd;
}

double estimate_p3_expectation(const Counts& counts, const PauliOperator& p3, std::uint64_t n) {
  check_n(n, counts);
  std::int64_t balance = 0;
  for (const auto& [bits, k] : counts) balance += in_plus_eigenspace(bits, p3) ? static_cast<std::int64_t>(k) : -static_cast<std::int64_t>(k);
  return static_cast<double>(balance) / static_cast<double>(n);
}

SrdfeBundle build_srdfe_bundle(const Circuit& c, Rng& rng) {
  const int n = c.width();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "SR-DFE needs at least one qubit");
  if (n > 31) throw Error(ErrorCode::InvalidArgument, "SR-DFE Pauli sampling supports at most 31 qubits");
  // Uniform over the 4^n - 1 non-identity Paulis.
  const std::uint64_t code = 1 + uniform_index(rng, (std::uint64_t{1} << (2 * n)) - 1);
  PauliOperator p1(n);
  for (int q = 0; q < n; ++q) {
    const auto v = (code >> (2 * q)) & 3U;
    p1.set(q, {static_cast<bool>(v & 1U), static_cast<bool>(v & 2U)});
  }
  return build_srdfe_bundle(c, p1, rng);
}

SrdfeBundle build_srdfe_bundle(const Circuit& c, const PauliOperator& p1, Rng& rng) {
  if (p1.size() != c.width()) throw Error(ErrorCode::InvalidArgument, "P1 width differs from the circuit width");
  if (p1.is_identity()) throw Error(ErrorCode::InvalidArgument, "P1 must not be the identity");
  if (p1.sign() < 0) throw Error(ErrorCode::InvalidArgument, "P1 must carry a + sign");
  SrdfeBundle b;
  b.base = c;
  b.p1 = p1;
  std::vector<Gate> prep;
  for (int q = 0; q < c.width(); ++q) {
    const auto f = p1.at(q);
    const int g = (f.x || f.z) ? pick(choices().prep[static_cast<std::size_t>(pauli_slot(f))], rng) : random_clifford_index(rng);
    prep.push_back(Gate::single(g, c.qubits()[static_cast<std::size_t>(q)]));
  }
  b.prep = Layer(std::move(prep));
  b.p2 = conjugate_pauli(c, p1);
  b.measure = measurement_layer(c, b.p2, rng);
  b.p3 = through_layer(c, b.measure, b.p2);

  std::vector<Layer> layers{b.prep};
  layers.insert(layers.end(), c.layers().begin(), c.layers().end());
  layers.push_back(b.measure);
  b.circuit = Circuit(c.qubits(), std::move(layers));

  b.null_measure = measurement_layer(c, p1, rng);
  b.null_p3 = through_layer(c, b.null_measure, p1);
  b.null_circuit = Circuit(c.qubits(), {b.prep, b.null_measure});
  return b;
}

double polarization(double fidelity, int n) {
  check_qubits(n);
  const double d2 = std::pow(4.0, n);
  return (d2 * fidelity - 1.0) / (d2 - 1.0);
}

double fidelity_from_polarization(double gamma, int n) {
  check_qubits(n);
  const double d2 = std::pow(4.0, n);
  return ((d2 - 1.0) * gamma + 1.0) / d2;
}

double dfe_fidelity(double mean_p3, int n) { return fidelity_from_polarization(mean_p3, n); }

double srdfe_fidelity(double fdfe_c, double fdfe_null, int n) {
  const double g_null = polarization(fdfe_null, n);
  if (g_null == 0.0 || !std::isfinite(g_null))
    throw Error(ErrorCode::DegenerateReference, "SPAM reference has zero process polarization");
  return fidelity_from_polarization(polarization(fdfe_c, n) / g_null, n);
}

double bootstrap_stderr(std::span<const double> values, int b, Rng& rng) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least one value");
  if (b < 100) throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 100 resamples");
  const std::size_t k = values.size();
  double sum = 0, sq = 0;
  for (int r = 0; r < b; ++r) {
    double m = 0;
    for (std::size_t i = 0; i < k; ++i) m += values[uniform_index(rng, k)];
    m /= static_cast<double>(k);
    sum += m;
    sq += m * m;
  }
  const double mean = sum / b;
  return std::sqrt(std::max(0.0, sq / b - mean * mean));
}

VectorSrdfe srdfe_vector_estimates(std::span<const double> p3, std::span<const double> null_p3, int n, int b, Rng& rng) {
  if (p3.empty() || p3.size() != null_p3.size())
    throw Error(ErrorCode::InvalidArgument, "SR-DFE needs one reference per circuit");
  if (b < 100) throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 100 resamples");
  const std::size_t k = p3.size();
  auto estimates = [&](auto pick_index) {
    double null_mean = 0;
    for (std::size_t i = 0; i < k; ++i) null_mean += null_p3[pick_index(i)];
    null_mean /= static_cast<double>(k);
    const double f_null = dfe_fidelity(null_mean, n);
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = srdfe_fidelity(dfe_fidelity(p3[pick_index(i)], n), f_null, n);
    return out;
  };
  VectorSrdfe v;
  v.per_circuit = estimates([](std::size_t i) { return i; });
  v.mean = std::accumulate(v.per_circuit.begin(), v.per_circuit.end(), 0.0) / static_cast<double>(k);
  double sum = 0, sq = 0;
  int used = 0;
  std::vector<std::size_t> draw(k);
  for (int r = 0; r < b; ++r) {
    for (auto& d : draw) d = uniform_index(rng, k);
    std::vector<double> e;
    try {
      e = estimates([&](std::size_t i) { return draw[i]; });
    } catch (const Error&) {
      continue;  // resample whose pooled reference is degenerate
    }
    const double m = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(k);
    sum += m;
    sq += m * m;
    ++used;
  }
  if (used > 0) {
    const double mean = sum / used;
    v.std_error = std::sqrt(std::max(0.0, sq / used - mean * mean));
  }
  return v;
}

}  // namespace fmb
