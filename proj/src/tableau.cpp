#include "fmb/tableau.hpp"

#include "fmb/clifford.hpp"
#include "fmb/error.hpp"

namespace fmb {

Tableau::Tableau(int n)
    : n_(n),
      words_(static_cast<std::size_t>((n + 63) / 64)),
      x_(static_cast<std::size_t>(2 * n + 1) * words_, 0),
      z_(static_cast<std::size_t>(2 * n + 1) * words_, 0),
      r_(static_cast<std::size_t>(2 * n + 1), 0) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative qubit count");
  for (int i = 0; i < n; ++i) {
    x_[idx(i, i)] |= std::uint64_t{1} << (i & 63);
    z_[idx(i + n, i)] |= std::uint64_t{1} << (i & 63);
  }
}

void Tableau::apply(const Gate& g) {
  for (int k = 0; k < g.arity(); ++k) {
    if (g.qubits[k] < 0 || g.qubits[k] >= n_)
      throw Error(ErrorCode::InvalidArgument, "gate qubit " + std::to_string(g.qubits[k]) + " outside tableau of size " +
                                                  std::to_string(n_));
  }
  if (g.is_identity()) return;
  if (g.is_two_qubit()) {
    const int a = g.qubits[0], b = g.qubits[1];
    const std::uint64_t ma = std::uint64_t{1} << (a & 63), mb = std::uint64_t{1} << (b & 63);
    for (int row = 0; row < 2 * n_; ++row) {
      const bool xa = x(row, a), za = z(row, a), xb = x(row, b), zb = z(row, b);
      r_[row] ^= static_cast<std::uint8_t>(xa && zb && (xb == za));
      if (xa) x_[idx(row, b)] ^= mb;
      if (zb) z_[idx(row, a)] ^= ma;
    }
    return;
  }
  const auto& table = CliffordTable::instance();
  const int q = g.qubits[0];
  const std::uint64_t m = std::uint64_t{1} << (q & 63);
  for (int row = 0; row < 2 * n_; ++row) {
    const PauliBits in{x(row, q), z(row, q)};
    if (!in.x && !in.z) continue;
    const auto out = table.conjugate(g.clifford, in);
    auto& xw = x_[idx(row, q)];
    auto& zw = z_[idx(row, q)];
    xw = out.pauli.x ? (xw | m) : (xw & ~m);
    zw = out.pauli.z ? (zw | m) : (zw & ~m);
    r_[row] ^= static_cast<std::uint8_t>(out.negate);
  }
}

void Tableau::apply(const Circuit& c) {
  if (c.width() != n_) throw Error(ErrorCode::InvalidArgument, "circuit width differs from tableau size");
  for (const auto& layer : c.layers()) {
    for (auto g : layer.gates()) {
      g.qubits[0] = c.position(g.qubits[0]);
      g.qubits[1] = c.position(g.qubits[1]);
      apply(g);
    }
  }
}

void Tableau::rowsum(int h, int i) {
  int phase = 2 * r_[h] + 2 * r_[i];
  for (int q = 0; q < n_; ++q) {
    const int x1 = x(i, q), z1 = z(i, q), x2 = x(h, q), z2 = z(h, q);
    if (x1 && z1)
      phase += z2 - x2;
    else if (x1)
      phase += z2 * (2 * x2 - 1);
    else if (z1)
      phase += x2 * (1 - 2 * z2);
  }
  phase = ((phase % 4) + 4) % 4;
  r_[h] = phase == 0 ? 0 : 1;
  for (std::size_t w = 0; w < words_; ++w) {
    x_[static_cast<std::size_t>(h) * words_ + w] ^= x_[static_cast<std::size_t>(i) * words_ + w];
    z_[static_cast<std::size_t>(h) * words_ + w] ^= z_[static_cast<std::size_t>(i) * words_ + w];
  }
}

void Tableau::copy_row(int dst, int src) {
  for (std::size_t w = 0; w < words_; ++w) {
    x_[static_cast<std::size_t>(dst) * words_ + w] = x_[static_cast<std::size_t>(src) * words_ + w];
    z_[static_cast<std::size_t>(dst) * words_ + w] = z_[static_cast<std::size_t>(src) * words_ + w];
  }
  r_[dst] = r_[src];
}

void Tableau::clear_row(int row) {
  for (std::size_t w = 0; w < words_; ++w) {
    x_[static_cast<std::size_t>(row) * words_ + w] = 0;
    z_[static_cast<std::size_t>(row) * words_ + w] = 0;
  }
  r_[row] = 0;
}

bool Tableau::is_deterministic(int q) const {
  for (int p = n_; p < 2 * n_; ++p)
    if (x(p, q)) return false;
  return true;
}

bool Tableau::measure(int q, std::optional<bool> forced, Rng* rng) {
  if (q < 0 || q >= n_) throw Error(ErrorCode::InvalidArgument, "measured qubit out of range");
  int p = -1;
  for (int row = n_; row < 2 * n_; ++row) {
    if (x(row, q)) {
      p = row;
      break;
    }
  }
  if (p >= 0) {
    for (int row = 0; row < 2 * n_; ++row) {
      if (row != p && x(row, q)) rowsum(row, p);
    }
    copy_row(p - n_, p);
    clear_row(p);
    z_[idx(p, q)] |= std::uint64_t{1} << (q & 63);
    bool outcome = false;
    if (forced)
      outcome = *forced;
    else if (rng)
      outcome = (*rng)() & 1U;
    r_[p] = outcome;
    return outcome;
  }
  const int scratch = 2 * n_;
  clear_row(scratch);
  for (int i = 0; i < n_; ++i) {
    if (x(i, q)) rowsum(scratch, i + n_);
  }
  return r_[scratch] != 0;
}

PauliOperator Tableau::row_operator(int row) const {
  PauliOperator p(n_);
  for (int q = 0; q < n_; ++q) p.set(q, {x(row, q), z(row, q)});
  if (r_[row]) p.negate();
  return p;
}

PauliOperator Tableau::stabilizer(int i) const { return row_operator(i + n_); }
PauliOperator Tableau::destabilizer(int i) const { return row_operator(i); }

std::string simulate_ideal_output(const Circuit& c) {
  Tableau t(c.width());
  t.apply(c);
  std::string out(static_cast<std::size_t>(c.width()), '0');
  for (int q = 0; q < c.width(); ++q) {
    if (!t.is_deterministic(q))
      throw Error(ErrorCode::NotDefiniteOutcome, "qubit " + std::to_string(c.qubits()[q]) + " has a random outcome");
    out[static_cast<std::size_t>(q)] = t.measure(q) ? '1' : '0';
  }
  return out;
}

std::vector<bool> reference_sample(const Circuit& c) {
  Tableau t(c.width());
  t.apply(c);
  std::vector<bool> bits(static_cast<std::size_t>(c.width()));
  for (int q = 0; q < c.width(); ++q) bits[static_cast<std::size_t>(q)] = t.measure(q, false);
  return bits;
}

}  // namespace fmb
