#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace fmb {

/// Unscrambled Sobol sequence with Joe-Kuo (new-joe-kuo-6) direction
/// numbers, generated in Gray-code order with 32-bit resolution.
class SobolSequence {
 public:
  static constexpr int kMaxDimension = 21;

  /// Throws UnsupportedDimension when dims is outside [1, kMaxDimension].
  explicit SobolSequence(int dims);

  int dimension() const { return dims_; }
  /// Index of the point next() will return; starts at 0 (the origin).
  std::uint64_t index() const { return index_; }

  std::vector<double> next();
  void skip(std::uint64_t n);

 private:
  int dims_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, 32>> v_;
  std::vector<std::uint32_t> x_;
};

}  // namespace fmb
