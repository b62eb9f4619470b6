#pragma once

#include <cstdint>
#include <random>

namespace ioi {

/// Seedable random stream backing all sampling in the engine.
///
/// The raw generator is std::mt19937_64; every variate is produced by
/// explicit transforms of its 64-bit output (53-bit uniforms, Box-Muller
/// normals, Marsaglia-Tsang gammas), so a given seed yields the same
/// stream of draws on every platform. Streams are single-owner: pass by
/// reference, never share across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform01();

  /// Standard normal draw (Box-Muller, two uniforms per call, no cache).
  double normal01();

  /// Gamma(shape, scale 1) draw, shape > 0.
  double gamma(double shape);

  /// Uniform integer in {0, 1, ..., n-1}.
  int uniform_int(int n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ioi
