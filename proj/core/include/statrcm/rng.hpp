#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace statrcm::rng {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Hashes a master seed and up to three counters into a stream key.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Counter-based generator: the n-th output is mix64(key + n * golden), so any stream is
/// fully determined by its key and independent of how other streams were consumed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stream tags keep parameter, state and measurement draws of one path independent.
enum class Stream : std::uint64_t { Parameters = 1, InitialState = 2, StateShock = 3, MeasurementShock = 4, Jitter = 5 };

}  // namespace statrcm::rng
