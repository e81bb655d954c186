#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/rng.hpp"

namespace testutil {

/// Random layered Clifford circuit on qubits 0..w-1; each layer pairs up a
/// random subset of qubits with CX (probability `p2` per pair) and fills the
/// rest with uniformly random single-qubit Cliffords.
inline fmb::Circuit random_circuit(int w, int d, fmb::Rng& rng, double p2 = 0.3) {
  std::vector<fmb::Qubit> qubits(static_cast<std::size_t>(w));
  std::iota(qubits.begin(), qubits.end(), 0);
  std::vector<fmb::Layer> layers;
  std::bernoulli_distribution coin(p2);
  for (int k = 0; k < d; ++k) {
    auto order = qubits;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<fmb::Gate> gates;
    std::size_t i = 0;
    while (i < order.size()) {
      if (i + 1 < order.size() && coin(rng)) {
        gates.push_back(fmb::Gate::cx(order[i], order[i + 1]));
        i += 2;
      } else {
        gates.push_back(fmb::Gate::single(static_cast<int>(fmb::uniform_index(rng, 24)), order[i]));
        i += 1;
      }
    }
    layers.emplace_back(std::move(gates));
  }
  return fmb::Circuit(qubits, std::move(layers));
}

}  // namespace testutil
