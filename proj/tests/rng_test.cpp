#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "ef/rng.hpp"

using ef::Rng;
using ef::derive_seed;

// Reference outputs below were produced by an independent implementation of
// splitmix64 and xoshiro256++ from their published constants.

TEST_CASE("splitmix64 matches the published seed-0 stream") {
  std::uint64_t s = 0;
  CHECK(Rng::splitmix64(s) == 0xe220a8397b1dcdafull);
  CHECK(Rng::splitmix64(s) == 0x6e789e6aa1b965f4ull);
  CHECK(Rng::splitmix64(s) == 0x06c45d188009454full);
}

TEST_CASE("xoshiro256++ stream is frozen for seed 42") {
  Rng rng(42);
  CHECK(rng.next_u64() == 0xd0764d4f4476689full);
  CHECK(rng.next_u64() == 0x519e4174576f3791ull);
  CHECK(rng.next_u64() == 0xfbe07cfb0c24ed8cull);
}

TEST_CASE("uniform01 values are frozen and inside [0,1)") {
  Rng rng(42);
  CHECK(rng.uniform01() == 0.8143051451229099);
  CHECK(rng.uniform01() == 0.3188210400616611);
  CHECK(rng.uniform01() == 0.9838941681774888);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform(lo,hi) is the affine image of uniform01") {
  Rng rng(42);
  CHECK(rng.uniform(-1.0, 1.0) == -1.0 + 2.0 * 0.8143051451229099);
  CHECK(rng.uniform(-1.0, 1.0) == -1.0 + 2.0 * 0.3188210400616611);
}

TEST_CASE("below() is frozen, in range, and hits every residue") {
  Rng rng(7);
  const std::uint64_t expect[] = {1, 6, 8, 6, 2, 5, 8, 2};
  for (std::uint64_t e : expect) CHECK(rng.below(10) == e);

  std::set<std::uint64_t> seen;
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t v = rng.below(10);
    CHECK(v < 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 10);
  CHECK(rng.below(1) == 0);
}

TEST_CASE("coin_flip is the top bit of the stream") {
  Rng rng(123);
  const bool expect[] = {true, true, true, true, false,
                         true, true, true, true, true};
  for (bool e : expect) CHECK(rng.coin_flip() == e);
}

TEST_CASE("shuffle permutes deterministically") {
  Rng rng(99);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  rng.shuffle(v);
  CHECK(v == std::vector<int>{7, 3, 5, 0, 6, 2, 1, 4});

  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("sample_distinct draws without replacement, in draw order") {
  Rng rng(2024);
  CHECK(rng.sample_distinct(10, 4) ==
        std::vector<std::size_t>{3, 0, 4, 9});
  // Exhaustive draw from the advanced state is a permutation of [0,5).
  CHECK(rng.sample_distinct(5, 5) ==
        std::vector<std::size_t>{2, 0, 4, 1, 3});

  Rng rng2(31);
  auto picks = rng2.sample_distinct(100, 40);
  std::set<std::size_t> uniq(picks.begin(), picks.end());
  CHECK(uniq.size() == 40);
  for (auto p : picks) CHECK(p < 100);
}

TEST_CASE("derive_seed is frozen and collision-free across streams") {
  CHECK(derive_seed(0, 0, 0) == 0x06c45d188009454full);
  CHECK(derive_seed(42, 1, 0) == 0x6ca2642fca59465dull);
  CHECK(derive_seed(42, 1, 1) == 0xdfe822a5554b4ccfull);
  CHECK(derive_seed(42, 2, 0) == 0x1145925cd49c24c6ull);

  // Same base, different (stream, index) pairs never collide in a grid big
  // enough to cover everything the trainer and attacker derive.
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 1; stream <= 9; ++stream)
    for (std::uint64_t index = 0; index < 100; ++index)
      seen.insert(derive_seed(5, stream, index));
  CHECK(seen.size() == 900);
}

TEST_CASE("identical seeds replay identical streams") {
  Rng a(777), b(777);
  for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.seed() == 777);
}
