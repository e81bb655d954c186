#include "fmb/frame_sim.hpp"

#include <cmath>

#include "fmb/clifford.hpp"
#include "fmb/error.hpp"
#include "fmb/rng.hpp"
#include "fmb/tableau.hpp"

namespace fmb {
namespace {

constexpr std::uint64_t kLanes = 64;

// Bernoulli(p) mask over the low `lanes` bits by geometric skipping.
std::uint64_t bernoulli_mask(double p, std::uint64_t lanes, Rng& rng) {
  if (p <= 0.0) return 0;
  const std::uint64_t all = lanes == 64 ? ~0ULL : ((1ULL << lanes) - 1);
  if (p >= 1.0) return all;
  const double inv_log = 1.0 / std::log1p(-p);
  std::uint64_t mask = 0;
  double lane = std::floor(std::log(uniform_open0(rng)) * inv_log);
  while (lane < static_cast<double>(lanes)) {
    mask |= 1ULL << static_cast<unsigned>(lane);
    lane += 1.0 + std::floor(std::log(uniform_open0(rng)) * inv_log);
  }
  return mask;
}

struct Frames {
  std::vector<std::uint64_t> x, z;
};

void run_block(const CompiledCircuit& c, std::uint64_t lanes, Rng& rng, Frames& f, Counts& out) {
  const auto& table = CliffordTable::instance();
  const auto w = static_cast<std::size_t>(c.width);
  f.x.assign(w, 0);
  f.z.resize(w);
  for (auto& zq : f.z) zq = rng();

  for (const auto& op : c.ops) {
    if (op.two_qubit) {
      f.x[op.b] ^= f.x[op.a];
      f.z[op.a] ^= f.z[op.b];
    } else {
      const auto& s = table.symplectic(op.clifford);
      const std::uint64_t x = f.x[op.a], z = f.z[op.a];
      f.x[op.a] = (s.a ? x : 0) ^ (s.b ? z : 0);
      f.z[op.a] = (s.c ? x : 0) ^ (s.d ? z : 0);
    }
    std::uint64_t hits = bernoulli_mask(op.rate, lanes, rng);
    while (hits) {
      const std::uint64_t bit = hits & (~hits + 1);
      hits ^= bit;
      if (op.two_qubit) {
        const auto k = 1 + uniform_index(rng, 15);
        if (k & 1) f.x[op.a] ^= bit;
        if (k & 2) f.z[op.a] ^= bit;
        if (k & 4) f.x[op.b] ^= bit;
        if (k & 8) f.z[op.b] ^= bit;
      } else {
        const auto k = 1 + uniform_index(rng, 3);
        if (k & 1) f.x[op.a] ^= bit;
        if (k & 2) f.z[op.a] ^= bit;
      }
    }
  }

  std::vector<std::uint64_t> outcome(w);
  for (std::size_t q = 0; q < w; ++q) {
    std::uint64_t bits = f.x[q] ^ (c.reference[q] ? ~0ULL : 0ULL);
    const auto flip1 = bernoulli_mask(c.readout[q].p1_to_0, lanes, rng);
    const auto flip0 = bernoulli_mask(c.readout[q].p0_to_1, lanes, rng);
    bits ^= (bits & flip1) | (~bits & flip0);
    outcome[q] = bits;
  }
  std::string key(w, '0');
  for (std::uint64_t lane = 0; lane < lanes; ++lane) {
    for (std::size_t q = 0; q < w; ++q) key[q] = ((outcome[q] >> lane) & 1U) ? '1' : '0';
    ++out[key];
  }
}

std::uint64_t lanes_in_block(std::uint64_t block, std::uint64_t shots) {
  const std::uint64_t start = block * kLanes;
  return std::min(kLanes, shots - start);
}

void merge_into(Counts& dst, const Counts& src) {
  for (const auto& [k, v] : src) dst[k] += v;
}

void check_shots(std::uint64_t shots) {
  if (shots == 0) throw Error(ErrorCode::InvalidArgument, "shot count must be at least 1");
}

}  // namespace

std::uint64_t total_shots(const Counts& counts) {
  std::uint64_t n = 0;
  for (const auto& [_, v] : counts) n += v;
  return n;
}

CompiledCircuit compile(const Circuit& c, const NoiseModel* noise) {
  CompiledCircuit out;
  out.width = c.width();
  for (const auto& layer : c.layers()) {
    for (const auto& g : layer.gates()) {
      if (g.is_identity()) continue;
      CompiledCircuit::Op op;
      op.two_qubit = g.is_two_qubit();
      op.clifford = g.clifford;
      op.a = c.position(g.qubits[0]);
      op.b = op.two_qubit ? c.position(g.qubits[1]) : op.a;
      if (noise) op.rate = op.two_qubit ? noise->pair_rate(g.qubits[0], g.qubits[1]) : noise->single_rate(g.qubits[0]);
      out.ops.push_back(op);
    }
  }
  out.readout.resize(static_cast<std::size_t>(out.width));
  if (noise) {
    for (int p = 0; p < out.width; ++p) out.readout[static_cast<std::size_t>(p)] = noise->readout(c.qubits()[static_cast<std::size_t>(p)]);
  }
  out.reference = reference_sample(c);
  return out;
}

Counts run_shots_serial(const CompiledCircuit& c, std::uint64_t shots, std::uint64_t seed) {
  check_shots(shots);
  const std::uint64_t blocks = (shots + kLanes - 1) / kLanes;
  Counts out;
  Frames frames;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    Rng rng(derive_seed(seed, {b}));
    run_block(c, lanes_in_block(b, shots), rng, frames, out);
  }
  return out;
}

Counts run_shots(const CompiledCircuit& c, std::uint64_t shots, std::uint64_t seed) {
  check_shots(shots);
  const auto blocks = static_cast<std::int64_t>((shots + kLanes - 1) / kLanes);
  Counts out;
#pragma omp parallel
  {
    Counts local;
    Frames frames;
#pragma omp for schedule(static) nowait
    for (std::int64_t b = 0; b < blocks; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      Rng rng(derive_seed(seed, {ub}));
      run_block(c, lanes_in_block(ub, shots), rng, frames, local);
    }
#pragma omp critical(fmb_counts_merge)
    merge_into(out, local);
  }
  return out;
}

}  // namespace fmb
