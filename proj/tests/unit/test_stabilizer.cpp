#include <gtest/gtest.h>

#include "../oracles/dense.hpp"
#include "fmb/clifford.hpp"
#include "fmb/error.hpp"
#include "fmb/pauli.hpp"
#include "fmb/tableau.hpp"
#include "helpers.hpp"

using namespace fmb;

namespace {

constexpr int kH = 1;  // CliffordTable word "H"

Circuit one_layer(std::vector<Qubit> qubits, std::vector<Gate> gates) {
  return Circuit(std::move(qubits), {Layer(std::move(gates))});
}

}  // namespace

TEST(Pauli, ParseAndPrint) {
  const auto p = PauliOperator::parse("-XIZY");
  EXPECT_EQ(p.size(), 4);
  EXPECT_EQ(p.sign(), -1);
  EXPECT_EQ(p.to_string(), "-XIZY");
  EXPECT_EQ(PauliOperator::parse("ZZ").to_string(), "+ZZ");
  EXPECT_EQ(p.weight(), 3);
  EXPECT_THROW(PauliOperator::parse("XQ"), Error);
}

TEST(Pauli, SquareIsIdentity) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    PauliOperator p(3);
    for (int q = 0; q < 3; ++q) p.set(q, {static_cast<bool>(rng() & 1), static_cast<bool>(rng() & 1)});
    p.set_sign(rng() & 1 ? -1 : 1);
    PauliOperator sq;
    const int phase = p.multiply(p, sq);
    EXPECT_TRUE(sq.is_identity());
    EXPECT_EQ(phase, 0);
    EXPECT_EQ(sq.sign(), 1);
  }
}

TEST(Pauli, MultiplyMatchesMatrices) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    PauliOperator a(2), b(2);
    for (int q = 0; q < 2; ++q) {
      a.set(q, {static_cast<bool>(rng() & 1), static_cast<bool>(rng() & 1)});
      b.set(q, {static_cast<bool>(rng() & 1), static_cast<bool>(rng() & 1)});
    }
    PauliOperator r;
    const int phase = a.multiply(b, r);
    const oracle::cd ip[4] = {1, {0, 1}, -1, {0, -1}};
    auto expect = oracle::pauli_matrix(r);
    for (auto& v : expect.a) v *= ip[phase];
    EXPECT_LT(oracle::max_abs_diff(oracle::mul(oracle::pauli_matrix(a), oracle::pauli_matrix(b)), expect), 1e-12);
    EXPECT_EQ(a.commutes_with(b), phase % 2 == 0);
  }
}

TEST(ConjugatePauli, TextbookCases) {
  EXPECT_EQ(conjugate_pauli(one_layer({0}, {Gate::single(kH, 0)}), PauliOperator::parse("Z")).to_string(), "+X");
  const auto cx = one_layer({0, 1}, {Gate::cx(0, 1)});
  EXPECT_EQ(conjugate_pauli(cx, PauliOperator::parse("ZI")).to_string(), "+ZI");
  EXPECT_EQ(conjugate_pauli(cx, PauliOperator::parse("XI")).to_string(), "+XX");
  EXPECT_THROW(conjugate_pauli(cx, PauliOperator::parse("X")), Error);
}

TEST(ConjugatePauli, MatchesDenseConjugation) {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const int w = 1 + i % 3;
    const auto c = testutil::random_circuit(w, 1 + i % 10, rng);
    PauliOperator p(w);
    for (int q = 0; q < w; ++q) p.set(q, {static_cast<bool>(rng() & 1), static_cast<bool>(rng() & 1)});
    p.set_sign(rng() & 1 ? -1 : 1);
    const auto u = oracle::circuit_unitary(c);
    const auto expect = oracle::mul(oracle::mul(u, oracle::pauli_matrix(p)), oracle::adjoint(u));
    const auto got = conjugate_pauli(c, p);
    EXPECT_LT(oracle::max_abs_diff(oracle::pauli_matrix(got), expect), 1e-9) << serialize(c);
    EXPECT_EQ(got.is_identity(), p.is_identity());
  }
}

TEST(ConjugatePauli, StaysInsideLightcone) {
  // Qubits never touched by a two-qubit gate keep identity factors identity.
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto c = testutil::random_circuit(4, 6, rng, 0.0);
    PauliOperator p(4);
    p.set(1, {true, false});
    const auto out = conjugate_pauli(c, p);
    for (int q : {0, 2, 3}) EXPECT_EQ(out.at(q), (PauliBits{false, false}));
    EXPECT_EQ(out.weight(), 1);
  }
}

TEST(Tableau, IdentityAndInvolution) {
  Tableau fresh(3), t(3);
  t.apply(Gate::single(0, 1));
  EXPECT_EQ(t, fresh);
  t.apply(Gate::single(kH, 2));
  t.apply(Gate::single(kH, 2));
  EXPECT_EQ(t, fresh);
  EXPECT_THROW(t.apply(Gate::single(kH, 3)), Error);
  EXPECT_THROW(t.apply(Gate::cx(0, 5)), Error);
}

TEST(Tableau, StabilizersCommuteAfterRandomGates) {
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto c = testutil::random_circuit(5, 20, rng);
    Tableau t(5);
    t.apply(c);
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        EXPECT_TRUE(t.stabilizer(a).commutes_with(t.stabilizer(b)));
        EXPECT_TRUE(t.destabilizer(a).commutes_with(t.destabilizer(b)));
        EXPECT_EQ(t.destabilizer(a).commutes_with(t.stabilizer(b)), a != b);
      }
    }
  }
}

TEST(Tableau, StabilizersMatchDenseState) {
  Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    const int w = 1 + i % 3;
    const auto c = testutil::random_circuit(w, 1 + i % 10, rng);
    Tableau t(w);
    t.apply(c);
    const auto psi = oracle::statevector(c);
    for (int k = 0; k < w; ++k) {
      const auto s = oracle::pauli_matrix(t.stabilizer(k));
      for (int r = 0; r < s.n; ++r) {
        oracle::cd v{};
        for (int col = 0; col < s.n; ++col) v += s(r, col) * psi[static_cast<std::size_t>(col)];
        EXPECT_LT(std::abs(v - psi[static_cast<std::size_t>(r)]), 1e-9) << serialize(c);
      }
    }
  }
}

TEST(IdealOutput, BasisPropagation) {
  const Circuit c({0, 1}, {Layer({Gate::single(CliffordTable::kPauliX, 0), Gate::single(0, 1)}), Layer({Gate::cx(0, 1)})});
  EXPECT_EQ(simulate_ideal_output(c), "11");
  EXPECT_EQ(simulate_ideal_output(c), "11");
}

TEST(IdealOutput, SuperpositionIsRejected) {
  try {
    simulate_ideal_output(one_layer({0}, {Gate::single(kH, 0)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDefiniteOutcome);
  }
}

TEST(IdealOutput, AgreesWithDenseOracle) {
  Rng rng(99);
  int definite = 0;
  for (int i = 0; i < 400; ++i) {
    const int w = 1 + i % 3;
    const auto c = testutil::random_circuit(w, 1 + i % 10, rng);
    const auto dense = oracle::basis_state(oracle::statevector(c), w);
    if (dense.empty()) {
      EXPECT_THROW(simulate_ideal_output(c), Error);
    } else {
      ++definite;
      EXPECT_EQ(simulate_ideal_output(c), dense);
    }
  }
  EXPECT_GT(definite, 20);
}

TEST(ReferenceSample, IsInSupport) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const int w = 1 + i % 3;
    const auto c = testutil::random_circuit(w, 1 + i % 8, rng);
    const auto ref = reference_sample(c);
    int idx = 0;
    for (int q = 0; q < w; ++q) idx |= (ref[static_cast<std::size_t>(q)] ? 1 : 0) << q;
    EXPECT_GT(std::abs(oracle::statevector(c)[static_cast<std::size_t>(idx)]), 1e-6);
  }
}
