#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>

namespace canonrep {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

inline constexpr std::string_view kGeneratorName = "philox4x32-10/v1";

/// A seekable stream of Philox blocks. The key is the seed; the counter is
/// (draw index, substream, stream low, stream high), so stream m of a seed can
/// be regenerated in isolation.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// (2k + 1) / 2^53 for a uniform 52-bit k: a dyadic in (0,1), exact as a double.
  double uniform_open01();
  /// Uniform on {0, ..., n - 1}, unbiased.
  std::uint64_t uniform_below(std::uint64_t n);
  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair();

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
};

}  // namespace canonrep
