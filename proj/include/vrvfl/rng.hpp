// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vrvfl {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over the bytes of `name`.
std::uint64_t hash_name(std::string_view name);

/// Seed of a named sub-stream. The rule is
///   s = splitmix64(master ^ splitmix64(hash_name(name)))
///   s = splitmix64(s ^ splitmix64(a + 1)); s = splitmix64(s ^ splitmix64(b + 1))
/// so every (master, name, a, b) tuple gets an independent mt19937_64 stream and
/// the environment streams never depend on draws made by the scheduler.
std::uint64_t stream_seed(std::uint64_t master, std::string_view name,
                          std::uint64_t a = 0, std::uint64_t b = 0);

inline Rng make_stream(std::uint64_t master, std::string_view name,
                       std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(stream_seed(master, name, a, b));
}

} // namespace vrvfl
