#pragma once

// Counter-based random streams. Every Monte-Carlo sample draws from its own
// stream derived from (seed, stream id, substream id), so results do not
// depend on how samples are distributed over worker threads.

#include <cstdint>
#include <random>

namespace owcsim {

// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RngStream {
  std::mt19937_64 engine;

  explicit RngStream(std::uint64_t seed) : engine(seed) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  }
  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(engine);
  }
  double normal(double mean, double sigma) {
    return std::normal_distribution<double>(mean, sigma)(engine);
  }
  // Unbiased integer in [0, n).
  std::uint64_t integer(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine);
  }
};

inline RngStream derive_stream(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t substream = 0) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ mix64(stream + 0x51ed2701a3c49e4dULL));
  s = mix64(s ^ mix64(substream + 0x2545f4914f6cdd1dULL));
  return RngStream(s);
}

// Stream ids for the experiment families; kept in one place so ids never collide.
namespace stream_id {
inline constexpr std::uint64_t pdf_samples = 1;
inline constexpr std::uint64_t rate_mc = 2;
inline constexpr std::uint64_t array_mc = 3;
inline constexpr std::uint64_t multiuser = 4;
inline constexpr std::uint64_t mobility_path = 5;
inline constexpr std::uint64_t mobility_noise = 6;
inline constexpr std::uint64_t dataset = 7;
inline constexpr std::uint64_t training = 8;
inline constexpr std::uint64_t occupancy = 9;
}  // namespace stream_id

}  // namespace owcsim
