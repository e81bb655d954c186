#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fmb/circuit.hpp"

namespace fmb {

struct ReadoutError {
  double p0_to_1 = 0.0;  // Pr(prep 0, measure 1)
  double p1_to_0 = 0.0;  // Pr(prep 1, measure 0)
};

/// Stochastic Pauli noise: after each non-identity gate a uniformly random
/// non-identity Pauli on the gate's support with the gate's error
/// probability, then per-qubit asymmetric readout flips.
class NoiseModel {
 public:
  void set_single(Qubit q, double p);
  void set_pair(Qubit a, Qubit b, double p);
  void set_readout(Qubit q, ReadoutError r);

  /// Throw IncompleteNoiseModel when the rate is not defined.
  double single_rate(Qubit q) const;
  double pair_rate(Qubit a, Qubit b) const;
  ReadoutError readout(Qubit q) const;

  const std::map<Qubit, double>& single_rates() const { return single_; }
  const std::map<std::pair<Qubit, Qubit>, double>& pair_rates() const { return pair_; }
  const std::map<Qubit, ReadoutError>& readout_errors() const { return readout_; }

  /// Graph whose edges are the pairs with a two-qubit rate.
  ConnectivityGraph connectivity() const;

  /// Same rates on every qubit and on every pair of `qubits`.
  static NoiseModel uniform(std::span<const Qubit> qubits, double e1, double e2, ReadoutError ro);

 private:
  std::map<Qubit, double> single_;
  std::map<std::pair<Qubit, Qubit>, double> pair_;
  std::map<Qubit, ReadoutError> readout_;
};

struct QubitCalibration {
  Qubit qubit = 0;
  double t1_us = 0, t2_us = 0, frequency_ghz = 0, anharmonicity_ghz = 0;
  double readout_error = 0, p1_to_0 = 0, p0_to_1 = 0, readout_length_ns = 0;
};

struct SingleQubitGateCalibration {
  Qubit qubit = 0;
  double error_percent = 0, gate_length_ns = 0;
};

struct TwoQubitGateCalibration {
  Qubit a = 0, b = 0;
  double error_percent = 0, gate_length_ns = 0;
};

/// Device calibration in the layout of IBM Q property tables: a per-qubit
/// property table followed by a gate-error table.
struct CalibrationTable {
  std::vector<QubitCalibration> qubits;
  std::vector<SingleQubitGateCalibration> single;
  std::vector<TwoQubitGateCalibration> pairs;
};

/// How a tabulated gate error (percent) becomes a Pauli-error probability.
enum class ErrorRateConvention {
  Direct,        // probability = error / 100
  Depolarizing,  // average infidelity r -> r (D + 1) / D
};

CalibrationTable parse_calibration(std::string_view csv_text);
std::string format_calibration(const CalibrationTable& table);

NoiseModel noise_model_from(const CalibrationTable& table, ErrorRateConvention convention = ErrorRateConvention::Direct);
NoiseModel ingest_calibration(const std::string& path, ErrorRateConvention convention = ErrorRateConvention::Direct);

}  // namespace fmb
