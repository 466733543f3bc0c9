#pragma once

#include <array>
#include <cstdint>

namespace ccpwf {

// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Independent stream families. Reference-name defaults and member migrations
// draw from disjoint families so the two sources stay independent.
enum class Stream : std::uint32_t {
  Migration = 1,
  ReferenceDefaults = 2,
  Test = 0xFFFF,
};

// Counter-based generator: the (seed, stream, substream) triple fixes the
// whole sequence, so a path's draws do not depend on which worker runs it.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t substream);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Unit-rate exponential.
  double exponential();

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace ccpwf
