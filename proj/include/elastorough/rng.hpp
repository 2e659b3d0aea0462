#ifndef ELASTOROUGH_RNG_HPP
#define ELASTOROUGH_RNG_HPP

#include <cstdint>
#include <random>

namespace elastorough
{

// SplitMix64 finalizer; used to derive independent per-sample streams.
inline std::uint64_t mix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//
// Deterministic stream keyed by (seed, stream id). The std distributions are
// implementation-defined, so uniforms are built from the raw 64-bit output instead.
//
class Stream
{
public:
  Stream(std::uint64_t seed, std::uint64_t id) : engine_(mix64(mix64(seed) ^ mix64(~id))) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
};

}  // namespace elastorough

#endif  // ELASTOROUGH_RNG_HPP
