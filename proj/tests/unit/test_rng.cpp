// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/rng.hpp"

#include <doctest.h>

#include <set>

using namespace vrvfl;

TEST_CASE("named streams are reproducible and distinct") {
  CHECK(stream_seed(1, "fading", 3, 4) == stream_seed(1, "fading", 3, 4));
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {1ULL, 2ULL})
    for (const char* name : {"arrivals", "vehicle", "data", "fading", "selection", "training"})
      for (std::uint64_t a = 0; a < 4; ++a)
        for (std::uint64_t b = 0; b < 4; ++b) seen.insert(stream_seed(master, name, a, b));
  CHECK(seen.size() == 2 * 6 * 16);

  Rng x = make_stream(9, "data", 5), y = make_stream(9, "data", 5);
  for (int i = 0; i < 10; ++i) CHECK(x() == y());
}

TEST_CASE("hash_name is FNV-1a") {
  CHECK(hash_name("") == 0xcbf29ce484222325ULL);
  CHECK(hash_name("a") == 0xaf63dc4c8601ec8cULL);
}
