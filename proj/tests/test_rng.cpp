#include <cmath>
#include <set>

#include "ccpwf/rng.hpp"
#include "doctest.h"

using ccpwf::CounterRng;
using ccpwf::Stream;

TEST_SUITE("rng") {

TEST_CASE("philox known answers") {
  const auto zero = ccpwf::philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);
  const auto ones = ccpwf::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("streams are reproducible and distinct") {
  CounterRng a(7, Stream::Migration, 3);
  CounterRng b(7, Stream::Migration, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  std::set<std::uint64_t> firsts;
  firsts.insert(CounterRng(7, Stream::Migration, 3).next_u64());
  firsts.insert(CounterRng(7, Stream::Migration, 4).next_u64());
  firsts.insert(CounterRng(7, Stream::ReferenceDefaults, 3).next_u64());
  firsts.insert(CounterRng(8, Stream::Migration, 3).next_u64());
  CHECK(firsts.size() == 4);
}

TEST_CASE("uniform and exponential moments") {
  CounterRng rng(2024, Stream::Test, 0);
  const int n = 200000;
  double su = 0.0, se = 0.0, se2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double e = rng.exponential();
    REQUIRE(e >= 0.0);
    se += e;
    se2 += e * e;
  }
  CHECK(std::abs(su / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(se / n - 1.0) < 4.0 / std::sqrt(n));
  CHECK(std::abs(se2 / n - 2.0) < 4.0 * std::sqrt(20.0 / n));
}

}  // TEST_SUITE
