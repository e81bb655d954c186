#include "fmb/pauli.hpp"

#include "fmb/error.hpp"

namespace fmb {

PauliOperator PauliOperator::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  PauliOperator p(static_cast<int>(text.size()));
  for (std::size_t i = 0; i < text.size(); ++i) {
    switch (text[i]) {
      case 'I': break;
      case 'X': p.bits_[i] = {true, false}; break;
      case 'Y': p.bits_[i] = {true, true}; break;
      case 'Z': p.bits_[i] = {false, true}; break;
      default: throw Error(ErrorCode::ParseError, "bad Pauli letter '" + std::string(1, text[i]) + "'");
    }
  }
  p.negative_ = negative;
  return p;
}

std::string PauliOperator::to_string() const {
  std::string s(1, negative_ ? '-' : '+');
  for (auto b : bits_) s.push_back(b.x ? (b.z ? 'Y' : 'X') : (b.z ? 'Z' : 'I'));
  return s;
}

bool PauliOperator::is_identity() const {
  for (auto b : bits_)
    if (b.x || b.z) return false;
  return true;
}

bool PauliOperator::is_z_type() const {
  for (auto b : bits_)
    if (b.x) return false;
  return true;
}

int PauliOperator::weight() const {
  int w = 0;
  for (auto b : bits_) w += (b.x || b.z) ? 1 : 0;
  return w;
}

bool PauliOperator::commutes_with(const PauliOperator& other) const {
  if (other.size() != size()) throw Error(ErrorCode::InvalidArgument, "Pauli size mismatch");
  bool anti = false;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    anti ^= (bits_[i].x && other.bits_[i].z) != (bits_[i].z && other.bits_[i].x);
  return !anti;
}

int PauliOperator::multiply(const PauliOperator& other, PauliOperator& result) const {
  if (other.size() != size()) throw Error(ErrorCode::InvalidArgument, "Pauli size mismatch");
  // Exponent of i accumulated from the single-qubit products, using the
  // Aaronson-Gottesman g function (Y carries its own i).
  int phase = (negative_ ? 2 : 0) + (other.negative_ ? 2 : 0);
  result = PauliOperator(size());
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    const int x1 = bits_[i].x, z1 = bits_[i].z, x2 = other.bits_[i].x, z2 = other.bits_[i].z;
    int g = 0;
    if (x1 && z1)
      g = z2 - x2;
    else if (x1)
      g = z2 * (2 * x2 - 1);
    else if (z1)
      g = x2 * (1 - 2 * z2);
    phase += g;
    result.bits_[i] = {static_cast<bool>(x1 ^ x2), static_cast<bool>(z1 ^ z2)};
  }
  phase = ((phase % 4) + 4) % 4;
  // Fold a real sign into the Hermitian result; odd exponents remain as i.
  if (phase >= 2) {
    result.negative_ = true;
    phase -= 2;
  }
  return phase;
}

void conjugate_in_place(PauliOperator& p, const Gate& g) {
  if (g.is_two_qubit()) {
    const int c = g.qubits[0], t = g.qubits[1];
    auto pc = p.at(c), pt = p.at(t);
    if (pc.x && pt.z && (pt.x == pc.z)) p.negate();
    pt.x ^= pc.x;
    pc.z ^= pt.z;
    p.set(c, pc);
    p.set(t, pt);
    return;
  }
  if (g.is_identity()) return;
  const auto image = CliffordTable::instance().conjugate(g.clifford, p.at(g.qubits[0]));
  p.set(g.qubits[0], image.pauli);
  if (image.negate) p.negate();
}

PauliOperator conjugate_pauli(const Circuit& c, const PauliOperator& p) {
  if (p.size() != c.width())
    throw Error(ErrorCode::InvalidArgument, "Pauli acts on " + std::to_string(p.size()) + " qubits, circuit has " +
                                                std::to_string(c.width()));
  PauliOperator out = p;
  for (const auto& layer : c.layers()) {
    for (auto g : layer.gates()) {
      g.qubits[0] = c.position(g.qubits[0]);
      g.qubits[1] = c.position(g.qubits[1]);
      conjugate_in_place(out, g);
    }
  }
  return out;
}

}  // namespace fmb
