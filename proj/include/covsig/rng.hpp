#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace covsig {

using Rng = std::mt19937_64;

//! Independent generator for the stream identified by (seed, keys...).
//! Streams are fixed by their keys alone, so work can be split across
//! threads in any order without changing results.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
  std::vector<std::uint32_t> words;
  words.reserve(2 * (keys.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : keys) {
    push(k);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

//! Stream domains, so that the same (seed, index) never feeds two purposes.
enum class StreamDomain : std::uint64_t {
  bootstrap = 1,
  replication_data = 2,
  replication_test = 3,
};

} // namespace covsig
