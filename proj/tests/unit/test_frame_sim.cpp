#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "../oracles/dense.hpp"
#include "fmb/clifford.hpp"
#include "fmb/error.hpp"
#include "fmb/frame_sim.hpp"
#include "helpers.hpp"

using namespace fmb;

namespace {

// Exact outcome distribution: diagonal of the noisy density matrix pushed
// through independent per-qubit readout confusion.
std::vector<double> exact_distribution(const Circuit& c, const NoiseModel& noise) {
  const int n = c.width(), dim = 1 << n;
  oracle::Mat rho(dim);
  rho(0, 0) = 1;
  rho = oracle::noisy_evolve(rho, c, n, [&](const Gate& g) {
    return g.is_two_qubit() ? noise.pair_rate(g.qubits[0], g.qubits[1]) : noise.single_rate(g.qubits[0]);
  });
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (int in = 0; in < dim; ++in) {
    const double pin = rho(in, in).real();
    for (int out = 0; out < dim; ++out) {
      double t = pin;
      for (int q = 0; q < n; ++q) {
        const auto ro = noise.readout(c.qubits()[static_cast<std::size_t>(q)]);
        const int a = (in >> q) & 1, b = (out >> q) & 1;
        const double flip = a ? ro.p1_to_0 : ro.p0_to_1;
        t *= a == b ? 1 - flip : flip;
      }
      p[static_cast<std::size_t>(out)] += t;
    }
  }
  return p;
}

int index_of(const std::string& bits) {
  int idx = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) idx |= (bits[q] == '1' ? 1 : 0) << q;
  return idx;
}

}  // namespace

TEST(FrameSim, NoiselessConcentratesOnIdealOutput) {
  const Circuit c({0, 1}, {Layer({Gate::single(CliffordTable::kPauliX, 0), Gate::single(0, 1)}), Layer({Gate::cx(0, 1)})});
  const auto counts = run_shots(compile(c), 1000, 7);
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.at("11"), 1000u);
}

TEST(FrameSim, CertainReadoutFlip) {
  const Circuit c({0, 1}, {Layer({Gate::single(3, 0), Gate::single(5, 1)})});
  auto noise = NoiseModel::uniform(std::vector<Qubit>{0, 1}, 0.0, 0.0, {});
  noise.set_readout(1, {1.0, 0.0});
  const auto counts = simulate_noisy_shots(Circuit({0, 1}, {Layer({Gate::single(5, 0), Gate::single(5, 1)})}), noise, 300, 1);
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.at("01"), 300u);
  EXPECT_EQ(total_shots(run_shots(compile(c, &noise), 77, 3)), 77u);
}

TEST(FrameSim, MissingRateIsIncomplete) {
  NoiseModel noise;
  noise.set_single(0, 0.01);
  noise.set_readout(0, {});
  const Circuit c({0, 1}, {Layer({Gate::cx(0, 1)})});
  try {
    compile(c, &noise);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompleteNoiseModel);
  }
}

TEST(FrameSim, SingleQubitDecayMatchesDensityMatrix) {
  // Ten gates composing to the identity; success probability against the
  // 2x2 density-matrix oracle within 3 sigma at 1e5 shots.
  const auto& t = CliffordTable::instance();
  std::vector<Layer> layers;
  int acc = 0;
  const int seq[9] = {1, 2, 7, 13, 4, 19, 22, 8, 17};
  for (int g : seq) {
    layers.push_back(Layer({Gate::single(g, 0)}));
    acc = t.compose(acc, g);
  }
  layers.push_back(Layer({Gate::single(t.inverse(acc), 0)}));
  const Circuit c({0}, layers);
  auto noise = NoiseModel::uniform(std::vector<Qubit>{0}, 0.01, 0.0, {});
  const auto p = exact_distribution(c, noise);
  const double n = 1e5;
  const auto counts = simulate_noisy_shots(c, noise, 100000, 2024);
  const double got = counts.count("0") ? static_cast<double>(counts.at("0")) / n : 0.0;
  EXPECT_LT(std::abs(got - p[0]), 3 * std::sqrt(p[0] * (1 - p[0]) / n)) << got << " vs " << p[0];
}

TEST(FrameSim, DistributionsMatchDensityMatrix) {
  Rng rng(404);
  const int shots = 40000;
  for (int i = 0; i < 12; ++i) {
    const int w = 1 + i % 3;
    const auto c = testutil::random_circuit(w, 2 + i % 6, rng, 0.5);
    NoiseModel noise;
    for (int q = 0; q < w; ++q) {
      noise.set_single(q, 0.02 + 0.01 * q);
      noise.set_readout(q, {0.03, 0.05});
      for (int r = q + 1; r < w; ++r) noise.set_pair(q, r, 0.08);
    }
    const auto p = exact_distribution(c, noise);
    const auto counts = simulate_noisy_shots(c, noise, shots, 900 + i);
    std::vector<double> freq(p.size());
    for (const auto& [bits, k] : counts) freq[static_cast<std::size_t>(index_of(bits))] = static_cast<double>(k) / shots;
    for (std::size_t x = 0; x < p.size(); ++x) {
      const double sigma = std::sqrt(std::max(p[x] * (1 - p[x]), 1e-6) / shots);
      EXPECT_LT(std::abs(freq[x] - p[x]), 5 * sigma) << serialize(c) << " outcome " << x;
    }
  }
}

TEST(FrameSim, ParallelMatchesSerial) {
  Rng rng(5);
  const auto c = testutil::random_circuit(6, 12, rng, 0.4);
  const auto noise = NoiseModel::uniform(c.qubits(), 0.01, 0.05, {0.02, 0.03});
  const auto compiled = compile(c, &noise);
  for (std::uint64_t shots : {1ULL, 63ULL, 64ULL, 1000ULL, 4097ULL}) {
    const auto a = run_shots(compiled, shots, 42);
    EXPECT_EQ(a, run_shots_serial(compiled, shots, 42));
    EXPECT_EQ(a, run_shots(compiled, shots, 42));
    EXPECT_EQ(total_shots(a), shots);
  }
  EXPECT_NE(run_shots(compiled, 1000, 42), run_shots(compiled, 1000, 43));
  EXPECT_THROW(run_shots(compiled, 0, 1), Error);
}
