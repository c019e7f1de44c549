// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
//
// Every random decision in the library is a pure function of
// (seed, stream, a, b): there is no generator state to carry or synchronize,
// so parallel trial loops produce bit-identical results under any scheduling,
// and any sampled object can be regenerated from its coordinates alone.
//
// Conventions used by the callers:
//   perc_edge:   a = edge index (or canonical edge hash), b = trial index
//   ray_choice:  a = vertex key,                          b = 0
//   ray_insert:  a = edge key,                            b = 0
//   walk_fwd/bwd:a = step index,                          b = trial index
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace perclab::rng {

enum class Stream : uint32_t {
  generic = 0,
  perc_edge = 1,
  ray_choice = 2,
  ray_insert = 3,
  walk_fwd = 4,
  walk_bwd = 5,
  subseed = 6,
};

namespace detail {
constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}
}  // namespace detail

// One 10-round Philox4x32 block. Key and counter layouts follow the reference
// implementation, so the known-answer vectors from the original paper apply.
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 2> key,
                                          std::array<uint32_t, 4> ctr) {
  using namespace detail;
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

inline uint64_t bits64(uint64_t seed, Stream stream, uint64_t a, uint64_t b) {
  std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                 static_cast<uint32_t>(seed >> 32)};
  std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(a),
                                 static_cast<uint32_t>(a >> 32),
                                 static_cast<uint32_t>(b),
                                 static_cast<uint32_t>(b >> 32) ^
                                     (static_cast<uint32_t>(stream) << 24)};
  auto out = philox4x32(key, ctr);
  return (static_cast<uint64_t>(out[1]) << 32) | out[0];
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(uint64_t seed, Stream stream, uint64_t a, uint64_t b) {
  return static_cast<double>(bits64(seed, stream, a, b) >> 11) * 0x1.0p-53;
}

// Uniform integer in {0, ..., n-1} (n small; modulo bias is < n / 2^64 and
// irrelevant at the scales used here, but documented).
inline uint32_t uniform_index(uint64_t seed, Stream stream, uint64_t a, uint64_t b,
                              uint32_t n) {
  return static_cast<uint32_t>(bits64(seed, stream, a, b) % n);
}

// FNV-1a over bytes: a fixed, implementation-independent string hash, so
// address-keyed sampling is reproducible across builds and platforms.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// 64-bit splittable hash used to fold structured addresses into counters.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
  return mix64(h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
}

}  // namespace perclab::rng
