#include <gtest/gtest.h>

#include "../oracles/dense.hpp"
#include "fmb/clifford.hpp"

using fmb::CliffordTable;

namespace {

// Equality of 2x2 unitaries up to global phase.
bool same_up_to_phase(const oracle::Mat& a, const oracle::Mat& b) {
  oracle::cd phase{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (std::abs(b.a[i]) > 1e-9) {
      phase = a.a[i] / b.a[i];
      break;
    }
  }
  for (std::size_t i = 0; i < 4; ++i)
    if (std::abs(a.a[i] - phase * b.a[i]) > 1e-9) return false;
  return std::abs(std::abs(phase) - 1) < 1e-9;
}

}  // namespace

TEST(Clifford, IdentityAndPauliPositions) {
  const auto& t = CliffordTable::instance();
  EXPECT_EQ(t.word(0), "");
  EXPECT_TRUE(same_up_to_phase(oracle::clifford_matrix(CliffordTable::kPauliX), oracle::pauli_1q({true, false})));
  EXPECT_TRUE(same_up_to_phase(oracle::clifford_matrix(CliffordTable::kPauliY), oracle::pauli_1q({true, true})));
  EXPECT_TRUE(same_up_to_phase(oracle::clifford_matrix(CliffordTable::kPauliZ), oracle::pauli_1q({false, true})));
}

TEST(Clifford, ElementsAreDistinct) {
  for (int a = 0; a < 24; ++a)
    for (int b = a + 1; b < 24; ++b)
      EXPECT_FALSE(same_up_to_phase(oracle::clifford_matrix(a), oracle::clifford_matrix(b))) << a << " " << b;
}

TEST(Clifford, CompositionAndInverseMatchMatrices) {
  const auto& t = CliffordTable::instance();
  for (int a = 0; a < 24; ++a) {
    EXPECT_EQ(t.compose(a, t.inverse(a)), 0);
    EXPECT_EQ(t.compose(t.inverse(a), a), 0);
    for (int b = 0; b < 24; ++b) {
      const auto m = oracle::mul(oracle::clifford_matrix(b), oracle::clifford_matrix(a));
      EXPECT_TRUE(same_up_to_phase(m, oracle::clifford_matrix(t.compose(a, b)))) << a << " then " << b;
    }
  }
}

TEST(Clifford, ConjugationMatchesMatrices) {
  const auto& t = CliffordTable::instance();
  const fmb::PauliBits ps[3] = {{true, false}, {true, true}, {false, true}};
  for (int c = 0; c < 24; ++c) {
    const auto u = oracle::clifford_matrix(c);
    for (const auto& p : ps) {
      const auto img = t.conjugate(c, p);
      auto expect = oracle::pauli_1q(img.pauli);
      if (img.negate)
        for (auto& v : expect.a) v = -v;
      const auto got = oracle::mul(oracle::mul(u, oracle::pauli_1q(p)), oracle::adjoint(u));
      EXPECT_LT(oracle::max_abs_diff(got, expect), 1e-12) << "C" << c;
    }
  }
}

TEST(Clifford, SymplecticMatchesConjugation) {
  // Frame bits follow the unsigned Pauli image: (x,z) -> (a x ^ b z, c x ^ d z).
  const auto& t = CliffordTable::instance();
  for (int c = 0; c < 24; ++c) {
    const auto& s = t.symplectic(c);
    for (int v = 1; v < 4; ++v) {
      const bool x = v & 1, z = v & 2;
      const auto img = t.conjugate(c, {x, z});
      EXPECT_EQ(img.pauli.x, ((s.a && x) != (s.b && z)));
      EXPECT_EQ(img.pauli.z, ((s.c && x) != (s.d && z)));
    }
  }
}
