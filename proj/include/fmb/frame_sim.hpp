#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/noise.hpp"

namespace fmb {

/// Histogram over measured bit strings ('0'/'1' in qubit-list order).
using Counts = std::map<std::string, std::uint64_t>;

std::uint64_t total_shots(const Counts& counts);

/// A circuit flattened into gate operations on tensor positions, with the
/// error probability of every gate and the readout confusion of every qubit
/// resolved up front.
struct CompiledCircuit {
  struct Op {
    bool two_qubit = false;
    int clifford = 0;
    int a = 0, b = 0;  // positions; b unused for single-qubit gates
    double rate = 0.0;
  };

  int width = 0;
  std::vector<Op> ops;
  std::vector<ReadoutError> readout;
  std::vector<bool> reference;  // one noiseless measurement record
};

/// Without a noise model every rate is zero. Identity gates are dropped.
/// Throws IncompleteNoiseModel when a used gate or qubit has no rate.
CompiledCircuit compile(const Circuit& c, const NoiseModel* noise = nullptr);

/// Pauli-frame sampling of `shots` noisy executions, 64 shots per block.
/// Block b draws from derive_seed(seed, {b}), so the histogram depends only
/// on (circuit, noise, shots, seed), never on the thread count.
Counts run_shots(const CompiledCircuit& c, std::uint64_t shots, std::uint64_t seed);
/// Single-threaded reference implementation of run_shots.
Counts run_shots_serial(const CompiledCircuit& c, std::uint64_t shots, std::uint64_t seed);

inline Counts simulate_noisy_shots(const Circuit& c, const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed) {
  return run_shots(compile(c, &noise), shots, seed);
}

}  // namespace fmb
