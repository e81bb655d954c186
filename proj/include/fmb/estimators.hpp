#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/frame_sim.hpp"
#include "fmb/pauli.hpp"
#include "fmb/rng.hpp"

namespace fmb {

enum class EstimatorKind { SuccessProbability, Srdfe };

std::string_view to_string(EstimatorKind k);
EstimatorKind estimator_from_string(std::string_view s);

struct CapabilityRecord {
  int i = 0;  // feature-vector index
  int j = 0;  // circuit index
  EstimatorKind kind = EstimatorKind::SuccessProbability;
  double estimate = 0.0;  // unclamped
  std::uint64_t shots = 0;
  std::optional<double> std_error;

  double clamped() const;
};

/// count(target) / N. Throws InvalidArgument when N is 0 or disagrees with
/// the histogram total.
double estimate_success_probability(const Counts& counts, std::string_view target, std::uint64_t n);

/// True when P3|x> = +|x> for the computational basis state x (P3 Z-type).
bool in_plus_eigenspace(std::string_view bits, const PauliOperator& p3);

/// (N_in - N_out) / N with membership decided by in_plus_eigenspace.
double estimate_p3_expectation(const Counts& counts, const PauliOperator& p3, std::uint64_t n);

/// One direct-fidelity-estimation circuit for a Clifford circuit c, plus its
/// depth-0 SPAM reference.
struct SrdfeBundle {
  Circuit base;
  PauliOperator p1;     // + sign, non-identity
  Layer prep;           // maps |0...0> to a +1 eigenstate of p1
  PauliOperator p2;     // U p1 U^dagger
  Layer measure;        // maps p2 to the Z-type p3
  PauliOperator p3;
  Circuit circuit;      // prep, c, measure
  Layer null_measure;   // maps p1 to the Z-type null_p3
  PauliOperator null_p3;
  Circuit null_circuit; // prep, null_measure
};

SrdfeBundle build_srdfe_bundle(const Circuit& c, Rng& rng);
/// Same with a caller-chosen P1 (must be non-identity, width of c).
SrdfeBundle build_srdfe_bundle(const Circuit& c, const PauliOperator& p1, Rng& rng);

/// Process polarization (4^n F - 1) / (4^n - 1) and its inverse.
double polarization(double fidelity, int n);
double fidelity_from_polarization(double gamma, int n);

/// Averaging <P3> over uniformly random non-identity P1 estimates the
/// process polarization; this maps that mean back to a fidelity.
double dfe_fidelity(double mean_p3, int n);

/// Gamma^{-1}(Gamma(fdfe_c) / Gamma(fdfe_null)). Throws DegenerateReference
/// when Gamma(fdfe_null) is zero.
double srdfe_fidelity(double fdfe_c, double fdfe_null, int n);

/// Standard deviation of the resampled mean over B with-replacement resamples.
/// Throws InvalidArgument for empty input or B < 100.
double bootstrap_stderr(std::span<const double> values, int b, Rng& rng);

/// SR-DFE estimates at one feature vector: circuit j gets
/// srdfe_fidelity(dfe_fidelity(p3[j]), dfe_fidelity(mean(null_p3)), n), i.e.
/// the K references are pooled to correct each of the K circuits.
struct VectorSrdfe {
  std::vector<double> per_circuit;
  double mean = 0.0;
  double std_error = 0.0;  // paired bootstrap over (circuit, reference) pairs
};

VectorSrdfe srdfe_vector_estimates(std::span<const double> p3, std::span<const double> null_p3, int n, int b, Rng& rng);

}  // namespace fmb
