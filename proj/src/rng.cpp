// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/rng.hpp"

namespace vrvfl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t stream_seed(std::uint64_t master, std::string_view name,
                          std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = splitmix64(master ^ splitmix64(hash_name(name)));
  s = splitmix64(s ^ splitmix64(a + 1));
  s = splitmix64(s ^ splitmix64(b + 1));
  return s;
}

} // namespace vrvfl
