#pragma once

#include <array>
#include <cstdint>

namespace kvreg {

/// Identifies one reproducible random stream. Equal pairs give equal
/// sequences; distinct pairs give independent ones.
struct RngStream {
  std::uint64_t seed = 42;
  std::uint64_t stream_id = 0;
};

/// xoshiro256** seeded by running SplitMix64 over (seed, stream_id).
/// The generator and both seeding steps are fixed so that every draw, and
/// therefore every report, is bit-reproducible across platforms.
class Generator {
 public:
  explicit Generator(RngStream stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1); 53 random bits.
  double uniform();
  /// Standard normal by the Marsaglia polar method.
  double normal();

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kvreg
