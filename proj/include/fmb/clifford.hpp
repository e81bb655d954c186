#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace fmb {

/// Single-qubit Pauli in symplectic form: I=(0,0) X=(1,0) Z=(0,1) Y=(1,1).
struct PauliBits {
  bool x = false;
  bool z = false;
  friend bool operator==(const PauliBits&, const PauliBits&) = default;
};

/// Result of conjugating a Hermitian single-qubit Pauli by a Clifford.
struct PauliImage {
  PauliBits pauli;
  bool negate = false;
};

/// The 24 single-qubit Cliffords C0..C23 (modulo global phase).
///
/// Indexing is canonical: elements are enumerated by breadth-first search
/// over words in {H, S} (application order, H before S), so each index's word
/// is its shortest-lex representative. C0 is the identity; the Paulis sit at
/// X = C12, Y = C23, Z = C5.
class CliffordTable {
 public:
  static constexpr int kSize = 24;
  static constexpr int kIdentity = 0;
  static constexpr int kPauliX = 12;
  static constexpr int kPauliY = 23;
  static constexpr int kPauliZ = 5;

  static const CliffordTable& instance();

  /// Gate word, letters applied left to right.
  const std::string& word(int c) const { return words_[c]; }
  int inverse(int c) const { return inverse_[c]; }
  /// Index of "apply first, then second".
  int compose(int first, int second) const { return compose_[first][second]; }
  /// C P C^dagger for a Hermitian Pauli P (identity maps to identity).
  PauliImage conjugate(int c, PauliBits p) const;
  bool is_pauli(int c) const { return c == kIdentity || c == kPauliX || c == kPauliY || c == kPauliZ; }

  /// Symplectic action on frame bits: x' = a x ^ b z, z' = c x ^ d z.
  struct Symplectic {
    bool a, b, c, d;
  };
  const Symplectic& symplectic(int c) const { return symplectic_[c]; }

 private:
  CliffordTable();

  std::array<std::string, kSize> words_{};
  std::array<int, kSize> inverse_{};
  std::array<std::array<int, kSize>, kSize> compose_{};
  // images_[c][k] for k = X, Y, Z (index 0, 1, 2).
  std::array<std::array<PauliImage, 3>, kSize> images_{};
  std::array<Symplectic, kSize> symplectic_{};
};

inline constexpr std::array<int, 4> kPauliGates = {CliffordTable::kIdentity, CliffordTable::kPauliX,
                                                   CliffordTable::kPauliY, CliffordTable::kPauliZ};

}  // namespace fmb
