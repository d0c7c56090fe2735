#include "kolmo/rng.hpp"

#include <cmath>

namespace kolmo::rng {

namespace {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

constexpr uint32_t kM0 = 0xD2511F53u;
constexpr uint32_t kM1 = 0xCD9E8D57u;
constexpr uint32_t kW0 = 0x9E3779B9u;
constexpr uint32_t kW1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> block(uint64_t seed, uint64_t stream,
                                     uint64_t ctr) {
  return philox4x32(
      {static_cast<uint32_t>(ctr), static_cast<uint32_t>(ctr >> 32),
       static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)},
      {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)});
}

inline uint64_t join(uint32_t hi, uint32_t lo) {
  return (static_cast<uint64_t>(hi) << 32) | lo;
}

// (u + 1/2) * 2^-64 lies strictly inside (0,1); log() below is always finite.
inline double to_unit(uint64_t u) {
  return (static_cast<double>(u) + 0.5) * 0x1p-64;
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> x,
                                   std::array<uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, x[0], hi0, lo0);
    mulhilo(kM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return x;
}

void normal_pair(uint64_t seed, uint64_t stream, uint64_t ctr, double& z0,
                 double& z1) {
  const auto w = block(seed, stream, ctr);
  const double u1 = to_unit(join(w[0], w[1]));
  const double u2 = to_unit(join(w[2], w[3]));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  z0 = r * std::cos(a);
  z1 = r * std::sin(a);
}

double uniform01(uint64_t seed, uint64_t stream, uint64_t ctr) {
  const auto w = block(seed, stream, ctr);
  return to_unit(join(w[0], w[1]));
}

uint64_t uniform_index(uint64_t seed, uint64_t stream, uint64_t ctr,
                       uint64_t n) {
  const auto w = block(seed, stream, ctr);
  return join(w[0], w[1]) % n;
}

uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t fnv1a(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace kolmo::rng
