#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/pauli.hpp"
#include "fmb/rng.hpp"

namespace fmb {

/// Aaronson-Gottesman stabilizer tableau (destabilizers rows 0..n-1,
/// stabilizers rows n..2n-1) over qubit positions 0..n-1. Starts in |0...0>.
class Tableau {
 public:
  explicit Tableau(int n);

  int size() const { return n_; }

  /// Gate qubits are tensor positions; throws InvalidArgument when out of range.
  void apply(const Gate& gate_at_positions);
  /// Applies every layer of `c`, mapping its qubit labels to positions.
  void apply(const Circuit& c);

  /// True when a Z measurement of position q has a definite outcome.
  bool is_deterministic(int q) const;
  /// Z measurement of position q. A random outcome takes `forced` if given,
  /// otherwise a fair coin from `rng`; the state collapses accordingly.
  bool measure(int q, std::optional<bool> forced = std::nullopt, Rng* rng = nullptr);

  PauliOperator stabilizer(int i) const;
  PauliOperator destabilizer(int i) const;

  friend bool operator==(const Tableau&, const Tableau&) = default;

 private:
  bool x(int row, int q) const { return (x_[idx(row, q)] >> (q & 63)) & 1U; }
  bool z(int row, int q) const { return (z_[idx(row, q)] >> (q & 63)) & 1U; }
  std::size_t idx(int row, int q) const { return static_cast<std::size_t>(row) * words_ + static_cast<std::size_t>(q >> 6); }
  void rowsum(int h, int i);
  void copy_row(int dst, int src);
  void clear_row(int row);
  PauliOperator row_operator(int row) const;

  int n_;
  std::size_t words_;
  std::vector<std::uint64_t> x_, z_;
  std::vector<std::uint8_t> r_;
};

/// The computational-basis output of a definite-outcome circuit on |0...0>,
/// as '0'/'1' characters in qubit-list order. Throws NotDefiniteOutcome.
std::string simulate_ideal_output(const Circuit& c);

/// One valid measurement record of `c` on |0...0> (random outcomes fixed to 0).
std::vector<bool> reference_sample(const Circuit& c);

}  // namespace fmb
