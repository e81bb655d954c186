#include <gtest/gtest.h>

#include "fmb/circuit.hpp"
#include "fmb/clifford.hpp"
#include "fmb/error.hpp"
#include "helpers.hpp"

using namespace fmb;

TEST(Layer, RejectsSharedQubit) {
  EXPECT_THROW(Layer({Gate::single(3, 0), Gate::cx(0, 1)}), Error);
  EXPECT_THROW(Layer({Gate::cx(2, 2)}), Error);
}

TEST(Circuit, RequiresFullCoverage) {
  EXPECT_THROW(Circuit({0, 1, 2}, {Layer({Gate::cx(0, 1)})}), Error);
  EXPECT_THROW(Circuit({0, 1}, {Layer({Gate::cx(0, 1), Gate::single(0, 2)})}), Error);
  EXPECT_NO_THROW(Circuit({0, 1, 2}, {Layer({Gate::cx(0, 1), Gate::single(0, 2)})}));
}

TEST(Circuit, SerializeRoundTrip) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto c = testutil::random_circuit(1 + i % 6, i % 9, rng);
    const auto text = serialize(c);
    const auto back = parse_circuit(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize(back), text);
  }
}

TEST(Circuit, ParseErrors) {
  EXPECT_THROW(parse_circuit("Q: 0 1\nL0: C1 0; C2 0\n"), Error);
  EXPECT_THROW(parse_circuit("Q: 0 1\nL0: C99 0; C2 1\n"), Error);
  EXPECT_THROW(parse_circuit("L0: C1 0\n"), Error);
  try {
    parse_circuit("Q: 0 1\nL0: CX 0 1\nL1: C1 0; C1 0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(Circuit, InvertLayer) {
  const auto& t = CliffordTable::instance();
  Layer l({Gate::single(7, 0), Gate::cx(1, 2), Gate::single(0, 3)});
  const auto inv = invert_layer(l);
  EXPECT_EQ(inv.gates()[0].clifford, t.inverse(7));
  EXPECT_EQ(inv.gates()[1], Gate::cx(1, 2));
  EXPECT_EQ(inv.gates()[2].clifford, 0);
  EXPECT_EQ(invert_layer(inv), l);
}

TEST(Features, TwoCxInThreeByFour) {
  // 3 qubits, 4 layers, 2 CX gates -> xi2q = 2*2/12 = 1/3
  std::vector<Layer> layers{Layer({Gate::cx(0, 1), Gate::single(1, 2)}),
                            Layer({Gate::single(0, 0), Gate::single(4, 1), Gate::single(0, 2)}),
                            Layer({Gate::single(0, 0), Gate::cx(2, 1)}),
                            Layer({Gate::single(0, 0), Gate::single(0, 1), Gate::single(0, 2)})};
  const Circuit c({0, 1, 2}, layers);
  const std::vector<Qubit> system{0, 1, 2, 3};
  const auto f = compute_features(c, system);
  EXPECT_EQ(f.w, 3);
  EXPECT_EQ(f.d, 4);
  EXPECT_EQ(f.n2q, 2);
  EXPECT_DOUBLE_EQ(f.xi2q, 1.0 / 3.0);
  EXPECT_EQ(f.n1q, 2);
  EXPECT_DOUBLE_EQ(f.xi1q, 2.0 / 12.0);
  EXPECT_EQ(f.active, (std::vector<bool>{true, true, true, false}));
}

TEST(Features, AllSingleQubitLayer) {
  std::vector<Gate> gates;
  for (int q = 0; q < 5; ++q) gates.push_back(Gate::single(1 + q, q));
  const Circuit c({0, 1, 2, 3, 4}, {Layer(gates)});
  const std::vector<Qubit> system{0, 1, 2, 3, 4};
  const auto f = compute_features(c, system);
  EXPECT_DOUBLE_EQ(f.xi1q, 1.0);
  EXPECT_DOUBLE_EQ(f.xi2q, 0.0);
}

TEST(Features, DensityIdentitiesByRecount) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto c = testutil::random_circuit(1 + i % 7, 1 + i % 11, rng, 0.5);
    int n2 = 0, n1 = 0;
    for (const auto& l : c.layers())
      for (const auto& g : l.gates()) (g.is_two_qubit() ? n2 : n1) += g.is_identity() ? 0 : 1;
    const auto f = compute_features(c, c.qubits());
    EXPECT_EQ(f.n2q, n2);
    EXPECT_EQ(f.n1q, n1);
    const double wd = static_cast<double>(c.width() * c.depth());
    EXPECT_DOUBLE_EQ(f.xi2q, 2.0 * n2 / wd);
    EXPECT_DOUBLE_EQ(f.xi1q, n1 / wd);
    EXPECT_LE(f.xi2q, 1.0);
    EXPECT_LE(f.xi1q, 1.0);
  }
}

TEST(Features, ZeroDepthIsDegenerate) {
  const Circuit c({0, 1}, {});
  try {
    compute_features(c, c.qubits());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCircuit);
  }
}

TEST(Connectivity, LineAndInduced) {
  const auto g = ConnectivityGraph::line(5);
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(0, 2));
  const std::vector<Qubit> sub{0, 1, 3};
  EXPECT_EQ(g.induced_edges(sub).size(), 1u);
  EXPECT_THROW(ConnectivityGraph({0, 1}, {{0, 0}}), Error);
  EXPECT_THROW(ConnectivityGraph({0, 1}, {{0, 5}}), Error);
}
