#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/clifford.hpp"

namespace fmb {

/// Signed Hermitian n-qubit Pauli operator, ±P_1 ⊗ ... ⊗ P_n. Tensor
/// positions follow a circuit's qubit-list order.
class PauliOperator {
 public:
  PauliOperator() = default;
  explicit PauliOperator(int n) : bits_(static_cast<std::size_t>(n)) {}

  /// "+XIZ", "-ZZ" or "XY" (sign optional, defaults to +).
  static PauliOperator parse(std::string_view text);
  std::string to_string() const;

  int size() const { return static_cast<int>(bits_.size()); }
  PauliBits at(int q) const { return bits_[static_cast<std::size_t>(q)]; }
  void set(int q, PauliBits p) { bits_[static_cast<std::size_t>(q)] = p; }
  int sign() const { return negative_ ? -1 : 1; }
  void set_sign(int s) { negative_ = s < 0; }
  void negate() { negative_ = !negative_; }

  bool is_identity() const;
  bool is_z_type() const;
  int weight() const;
  bool commutes_with(const PauliOperator& other) const;

  /// Product this·other = i^phase · result; returns the i-exponent in [0,4).
  int multiply(const PauliOperator& other, PauliOperator& result) const;

  friend bool operator==(const PauliOperator&, const PauliOperator&) = default;

 private:
  std::vector<PauliBits> bits_;
  bool negative_ = false;
};

/// Applies one gate (qubits given as tensor positions) to P by conjugation.
void conjugate_in_place(PauliOperator& p, const Gate& gate_at_positions);

/// U P U^dagger for the unitary U implemented by `c`.
PauliOperator conjugate_pauli(const Circuit& c, const PauliOperator& p);

}  // namespace fmb
