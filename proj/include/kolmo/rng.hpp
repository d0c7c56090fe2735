#pragma once

#include <array>
#include <cstdint>

namespace kolmo::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Every random number in the artifact is addressed by (seed, stream, counter),
// so results do not depend on thread count or evaluation order.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key);

// Stream ids carry a purpose tag in the top byte so that independent uses of
// the same logical index (particle i, bootstrap replicate i, ...) never
// collide.
enum class Purpose : uint64_t {
  Evolve = 1,
  Init = 2,
  Bootstrap = 3,
  ScanDir = 4,
  Projection = 5,
  OracleMc = 6,
  ChildSeed = 7,
};

inline uint64_t stream_id(Purpose p, uint64_t id) {
  return (static_cast<uint64_t>(p) << 56) | (id & 0x00FFFFFFFFFFFFFFull);
}

/// Pair of independent N(0,1) draws for (seed, stream, ctr).
void normal_pair(uint64_t seed, uint64_t stream, uint64_t ctr, double& z0,
                 double& z1);

/// Uniform draw in (0,1) with 64-bit resolution.
double uniform01(uint64_t seed, uint64_t stream, uint64_t ctr);

/// Uniform index in [0, n).
uint64_t uniform_index(uint64_t seed, uint64_t stream, uint64_t ctr,
                       uint64_t n);

/// splitmix64 finalizer; used to derive child seeds from (root seed, label).
uint64_t mix64(uint64_t x);

/// FNV-1a 64-bit hash of a byte string (config hashing, seed labels).
uint64_t fnv1a(const void* data, size_t len);

}  // namespace kolmo::rng
