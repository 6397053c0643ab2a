#pragma once

#include <cstdint>
#include <random>

namespace cspde {

/// Reproducible random stream identified by (master seed, stream index).
///
/// Identical pairs replay identical draws; distinct pairs seed the engine from
/// distinct seed sequences. One stream per trajectory or per Monte-Carlo block,
/// never shared between threads.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

  /// Stream derived from this one's identity (not its current position).
  RngStream child(std::uint64_t index) const;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace cspde
