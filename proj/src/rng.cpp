#include "cspde/rng.hpp"

namespace cspde {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32),
                    0x5eedU};
  engine_.seed(seq);
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(master_seed_, mix64(stream_index_ ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace cspde
