#pragma once
// Dense complex-matrix simulation used as an independent reference for the
// stabilizer code. Qubit position p is bit p of the basis-state index.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/clifford.hpp"
#include "fmb/pauli.hpp"

namespace oracle {

using cd = std::complex<double>;

struct Mat {
  int n = 0;  // dimension
  std::vector<cd> a;
  explicit Mat(int dim = 0) : n(dim), a(static_cast<std::size_t>(dim) * dim) {}
  cd& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
  cd operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1;
    return m;
  }
};

inline Mat mul(const Mat& x, const Mat& y) {
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const cd v = x(i, k);
      if (v == cd{}) continue;
      for (int j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

inline Mat adjoint(const Mat& x) {
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) r(i, j) = std::conj(x(j, i));
  return r;
}

inline double max_abs_diff(const Mat& x, const Mat& y) {
  double m = 0;
  for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

/// 2x2 matrix of Clifford index c built from its H/S word (letters applied in order).
inline Mat clifford_matrix(int c) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat h(2), sg(2);
  h(0, 0) = s, h(0, 1) = s, h(1, 0) = s, h(1, 1) = -s;
  sg(0, 0) = 1, sg(1, 1) = cd(0, 1);
  Mat u = Mat::identity(2);
  for (char ch : fmb::CliffordTable::instance().word(c)) u = mul(ch == 'H' ? h : sg, u);
  return u;
}

inline Mat pauli_1q(fmb::PauliBits p) {
  Mat m(2);
  if (!p.x && !p.z) m(0, 0) = m(1, 1) = 1;
  else if (p.x && !p.z) m(0, 1) = m(1, 0) = 1;
  else if (!p.x && p.z) m(0, 0) = 1, m(1, 1) = -1;
  else m(0, 1) = cd(0, -1), m(1, 0) = cd(0, 1);
  return m;
}

/// Full 2^n matrix of a signed Pauli operator (position p = bit p).
inline Mat pauli_matrix(const fmb::PauliOperator& p) {
  const int n = p.size(), dim = 1 << n;
  Mat m(dim);
  for (int col = 0; col < dim; ++col) {
    int row = 0;
    cd amp = p.sign();
    for (int q = 0; q < n; ++q) {
      const Mat f = pauli_1q(p.at(q));
      const int b = (col >> q) & 1;
      int out = -1;
      for (int r = 0; r < 2; ++r)
        if (f(r, b) != cd{}) out = r;
      amp *= f(out, b);
      row |= out << q;
    }
    m(row, col) = amp;
  }
  return m;
}

/// Embeds a 2x2 unitary on position q of an n-qubit register.
inline Mat embed_1q(const Mat& u, int q, int n) {
  const int dim = 1 << n;
  Mat m(dim);
  for (int col = 0; col < dim; ++col) {
    const int b = (col >> q) & 1;
    for (int r = 0; r < 2; ++r) m((col & ~(1 << q)) | (r << q), col) += u(r, b);
  }
  return m;
}

inline Mat cx_matrix(int control, int target, int n) {
  const int dim = 1 << n;
  Mat m(dim);
  for (int col = 0; col < dim; ++col) m(((col >> control) & 1) ? col ^ (1 << target) : col, col) = 1;
  return m;
}

/// Unitary of one gate acting on positions.
inline Mat gate_matrix(const fmb::Gate& g, int n) {
  if (g.is_two_qubit()) return cx_matrix(g.qubits[0], g.qubits[1], n);
  return embed_1q(clifford_matrix(g.clifford), g.qubits[0], n);
}

inline fmb::Gate at_positions(const fmb::Circuit& c, const fmb::Gate& g) {
  fmb::Gate p = g;
  p.qubits[0] = c.position(g.qubits[0]);
  p.qubits[1] = c.position(g.qubits[1]);
  return p;
}

inline Mat circuit_unitary(const fmb::Circuit& c) {
  const int n = c.width();
  Mat u = Mat::identity(1 << n);
  for (const auto& layer : c.layers())
    for (const auto& g : layer.gates()) u = mul(gate_matrix(at_positions(c, g), n), u);
  return u;
}

inline std::vector<cd> statevector(const fmb::Circuit& c) {
  const Mat u = circuit_unitary(c);
  std::vector<cd> psi(static_cast<std::size_t>(u.n));
  for (int i = 0; i < u.n; ++i) psi[static_cast<std::size_t>(i)] = u(i, 0);
  return psi;
}

/// Bit string ('0'/'1' per position) of a basis state, or "" when the state
/// is a superposition.
inline std::string basis_state(const std::vector<cd>& psi, int n) {
  int found = -1;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (std::abs(psi[i]) > 1e-9) {
      if (found >= 0) return "";
      found = static_cast<int>(i);
    }
  }
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q) s[static_cast<std::size_t>(q)] = ((found >> q) & 1) ? '1' : '0';
  return s;
}

/// All 4^k k-qubit Paulis on `positions` of an n-qubit register; index 0 is identity.
inline std::vector<Mat> paulis_on(const std::vector<int>& positions, int n) {
  const int k = static_cast<int>(positions.size());
  std::vector<Mat> out;
  for (int v = 0; v < (1 << (2 * k)); ++v) {
    fmb::PauliOperator p(n);
    for (int i = 0; i < k; ++i) {
      const int code = (v >> (2 * i)) & 3;
      p.set(positions[static_cast<std::size_t>(i)], {static_cast<bool>(code & 1), static_cast<bool>(code & 2)});
    }
    out.push_back(pauli_matrix(p));
  }
  return out;
}

/// Density matrix evolution under the stochastic Pauli model: after each
/// non-identity gate, with probability e a uniformly random non-identity
/// Pauli on the gate's support. `rate(g)` returns e for a gate.
template <class RateFn>
Mat noisy_evolve(Mat rho, const fmb::Circuit& c, int n_total, RateFn rate) {
  for (const auto& layer : c.layers()) {
    for (const auto& g : layer.gates()) {
      if (g.is_identity()) continue;
      const fmb::Gate pg = at_positions(c, g);
      const Mat u = gate_matrix(pg, n_total);
      rho = mul(mul(u, rho), adjoint(u));
      const double e = rate(g);
      if (e <= 0) continue;
      std::vector<int> support{pg.qubits[0]};
      if (pg.is_two_qubit()) support.push_back(pg.qubits[1]);
      const auto ps = paulis_on(support, n_total);
      Mat acc(rho.n);
      for (std::size_t i = 0; i < rho.a.size(); ++i) acc.a[i] = (1 - e) * rho.a[i];
      const double w = e / static_cast<double>(ps.size() - 1);
      for (std::size_t k = 1; k < ps.size(); ++k) {
        const Mat t = mul(mul(ps[k], rho), ps[k]);
        for (std::size_t i = 0; i < rho.a.size(); ++i) acc.a[i] += w * t.a[i];
      }
      rho = acc;
    }
  }
  return rho;
}

/// Process (entanglement) fidelity of the noisy implementation of `c`
/// against its ideal unitary, via the Choi state on system (bits 0..n-1)
/// and ancilla (bits n..2n-1).
template <class RateFn>
double process_fidelity(const fmb::Circuit& c, RateFn rate) {
  const int n = c.width(), d = 1 << n, dim = d * d;
  std::vector<cd> phi(static_cast<std::size_t>(dim));
  for (int i = 0; i < d; ++i) phi[static_cast<std::size_t>(i | (i << n))] = 1.0 / std::sqrt(static_cast<double>(d));
  Mat rho(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) rho(i, j) = phi[static_cast<std::size_t>(i)] * std::conj(phi[static_cast<std::size_t>(j)]);
  rho = noisy_evolve(rho, c, 2 * n, rate);
  // ideal: (U ⊗ I)|phi>, U acting on system bits only
  const Mat u = circuit_unitary(c);
  std::vector<cd> target(static_cast<std::size_t>(dim));
  for (int i = 0; i < d; ++i)
    for (int r = 0; r < d; ++r) target[static_cast<std::size_t>(r | (i << n))] += u(r, i) / std::sqrt(static_cast<double>(d));
  cd f = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) f += std::conj(target[static_cast<std::size_t>(i)]) * rho(i, j) * target[static_cast<std::size_t>(j)];
  return f.real();
}

}  // namespace oracle
