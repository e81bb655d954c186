#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/rng.hpp"

namespace fmb {

/// Qubit selection shared by the samplers: an explicit list, or the first w
/// vertices of the connectivity graph in label order.
struct QubitChoice {
  std::optional<std::vector<Qubit>> explicit_qubits;

  std::vector<Qubit> select(const ConnectivityGraph& g, int w) const;
};

struct MirrorSamplerConfig {
  ConnectivityGraph connectivity;
  QubitChoice qubits;
};

struct FixedDensitySamplerConfig {
  ConnectivityGraph connectivity;
  QubitChoice qubits;
  int max_retries = 64;
};

/// One layer on `q`: a random maximal matching of the induced connectivity,
/// each matched edge kept as a randomly oriented CX with probability
/// min(1, |q| xi / |matching|), every other qubit a uniform C0-C23.
Layer sample_edgegrab_layer(const ConnectivityGraph& g, std::span<const Qubit> q, double xi, Rng& rng);

/// Randomized mirror circuit of benchmark depth d (d + 3 layers): a random
/// Clifford cap, d/2 edgegrab layers (the second half inverting the first)
/// interleaved with d/2 + 1 random Pauli layers, then the inverse cap.
/// Throws BadBenchmarkDepth unless d >= 4 and d % 4 == 0.
Circuit sample_mirror_circuit(int w, int d, double xi, const MirrorSamplerConfig& config, Rng& rng);

/// Number of CX gates a fixed-density circuit at (w, d, xi) contains:
/// round(w d xi / 2), ties up.
int fixed_density_cx_count(int w, int d, double xi);

/// Random Clifford circuit with exactly fixed_density_cx_count(w, d, xi) CX
/// gates at random non-conflicting positions; all other slots hold uniform
/// C0-C23. Throws DensityInfeasible when they cannot be placed.
Circuit sample_fixed_density_circuit(int w, int d, double xi, const FixedDensitySamplerConfig& config, Rng& rng);

}  // namespace fmb
