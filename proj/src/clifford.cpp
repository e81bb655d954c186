#include "fmb/clifford.hpp"

#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace fmb {
namespace {

struct Row {
  bool x, z, r;
};

void apply_letter(char g, Row& row) {
  if (g == 'H') {
    row.r ^= row.x && row.z;
    std::swap(row.x, row.z);
  } else {
    row.r ^= row.x && row.z;
    row.z ^= row.x;
  }
}

Row apply_word(const std::string& word, Row row) {
  for (char g : word) apply_letter(g, row);
  return row;
}

using Key = std::tuple<bool, bool, bool, bool, bool, bool>;

Key key_of(const std::string& word) {
  const Row x = apply_word(word, {true, false, false});
  const Row z = apply_word(word, {false, true, false});
  return {x.x, x.z, x.r, z.x, z.z, z.r};
}

int pauli_slot(PauliBits p) {
  if (p.x && !p.z) return 0;
  if (p.x && p.z) return 1;
  return 2;
}

}  // namespace

const CliffordTable& CliffordTable::instance() {
  static const CliffordTable table;
  return table;
}

CliffordTable::CliffordTable() {
  std::map<Key, int> index;
  std::vector<std::string> found{""};
  index[key_of("")] = 0;
  for (std::size_t head = 0; head < found.size(); ++head) {
    for (char g : {'H', 'S'}) {
      std::string w = found[head] + g;
      if (index.emplace(key_of(w), static_cast<int>(found.size())).second) found.push_back(w);
    }
  }
  if (found.size() != kSize) throw std::logic_error("Clifford enumeration did not close at 24 elements");

  for (int c = 0; c < kSize; ++c) {
    words_[c] = found[c];
    const PauliBits inputs[3] = {{true, false}, {true, true}, {false, true}};
    for (int k = 0; k < 3; ++k) {
      const Row out = apply_word(words_[c], {inputs[k].x, inputs[k].z, false});
      images_[c][k] = {{out.x, out.z}, out.r};
    }
    const PauliBits ix = images_[c][0].pauli;
    const PauliBits iz = images_[c][2].pauli;
    symplectic_[c] = {ix.x, iz.x, ix.z, iz.z};
  }
  for (int a = 0; a < kSize; ++a) {
    for (int b = 0; b < kSize; ++b) compose_[a][b] = index.at(key_of(words_[a] + words_[b]));
  }
  for (int a = 0; a < kSize; ++a) {
    for (int b = 0; b < kSize; ++b) {
      if (compose_[a][b] == kIdentity) inverse_[a] = b;
    }
  }
  if (index.at(key_of("HSSH")) != kPauliX || index.at(key_of("HSSHSS")) != kPauliY ||
      index.at(key_of("SS")) != kPauliZ)
    throw std::logic_error("Pauli positions in Clifford table changed");
}

PauliImage CliffordTable::conjugate(int c, PauliBits p) const {
  if (!p.x && !p.z) return {};
  return images_[c][pauli_slot(p)];
}

}  // namespace fmb
