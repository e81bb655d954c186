#include "fmb/sobol.hpp"

#include <bit>

#include "fmb/error.hpp"

namespace fmb {
namespace {

struct Primitive {
  int s;
  std::uint32_t a;
  std::array<std::uint32_t, 7> m;
};

// Dimensions 2..21 of new-joe-kuo-6.21201.
constexpr std::array<Primitive, SobolSequence::kMaxDimension - 1> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
}};

}  // namespace

SobolSequence::SobolSequence(int dims) : dims_(dims) {
  if (dims < 1 || dims > kMaxDimension)
    throw Error(ErrorCode::UnsupportedDimension,
                "Sobol dimension " + std::to_string(dims) + " outside [1, " + std::to_string(kMaxDimension) + "]");
  v_.resize(static_cast<std::size_t>(dims));
  x_.assign(static_cast<std::size_t>(dims), 0);
  for (int k = 0; k < 32; ++k) v_[0][k] = 1U << (31 - k);
  for (int d = 1; d < dims; ++d) {
    const auto& p = kJoeKuo[static_cast<std::size_t>(d - 1)];
    auto& v = v_[static_cast<std::size_t>(d)];
    for (int k = 0; k < p.s; ++k) v[k] = p.m[k] << (31 - k);
    for (int k = p.s; k < 32; ++k) {
      std::uint32_t val = v[k - p.s] ^ (v[k - p.s] >> p.s);
      for (int j = 1; j < p.s; ++j)
        if ((p.a >> (p.s - 1 - j)) & 1U) val ^= v[k - j];
      v[k] = val;
    }
  }
}

std::vector<double> SobolSequence::next() {
  std::vector<double> point(static_cast<std::size_t>(dims_));
  for (std::size_t d = 0; d < point.size(); ++d) point[d] = static_cast<double>(x_[d]) / 4294967296.0;
  // Gray-code step: flip the direction number of the lowest zero bit.
  const int c = std::countr_one(index_);
  if (c >= 32) throw Error(ErrorCode::InvalidArgument, "Sobol sequence exhausted");
  for (std::size_t d = 0; d < point.size(); ++d) x_[d] ^= v_[d][static_cast<std::size_t>(c)];
  ++index_;
  return point;
}

void SobolSequence::skip(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) next();
}

}  // namespace fmb
