#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace oscnet {

/// Philox4x32-10 block function. Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The 64-bit seed is the Philox key, the stream
/// index occupies the upper half of the counter and the lower half counts
/// blocks, so (seed, index) pins the whole sequence on every platform and
/// under any thread schedule.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Box-Muller on consecutive uniforms).
  double normal();
  void fill_normal(std::span<double> out);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

inline RngStream seed_stream(std::uint64_t seed, std::uint64_t index) { return RngStream(seed, index); }

/// Stream index for member `member` of group `group` (e.g. scan level, trajectory).
inline std::uint64_t stream_index(std::uint32_t group, std::uint32_t member) {
  return (static_cast<std::uint64_t>(group) << 32) | member;
}

}  // namespace oscnet
