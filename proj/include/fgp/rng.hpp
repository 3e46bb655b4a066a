#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fgp {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: every draw is a pure function of (key, counter), so parallel
// schedules cannot change the stream.
namespace philox {

inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

using ctr_t = std::array<std::uint32_t, 4>;
using key_t = std::array<std::uint32_t, 2>;

inline void round_once(ctr_t& x, key_t& k) {
  const std::uint64_t p0 = std::uint64_t(kMul0) * x[0];
  const std::uint64_t p1 = std::uint64_t(kMul1) * x[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
  k[0] += kWeyl0;
  k[1] += kWeyl1;
}

inline ctr_t block(ctr_t x, key_t k) {
  for (int r = 0; r < 10; ++r) round_once(x, k);
  return x;
}

}  // namespace philox

// One N(0,1) variate per (seed, path, component, step) via Box-Muller on a
// dedicated Philox block. Deterministic and order-independent.
inline double gauss_draw(std::uint64_t seed, std::uint64_t path,
                         std::uint32_t component, std::uint64_t step) {
  philox::key_t key{std::uint32_t(seed), std::uint32_t(seed >> 32)};
  philox::ctr_t ctr{std::uint32_t(step), std::uint32_t(step >> 32),
                    std::uint32_t(path) ^ (component << 24),
                    std::uint32_t(path >> 32) ^ (component >> 8)};
  const philox::ctr_t out = philox::block(ctr, key);
  const std::uint64_t a = (std::uint64_t(out[0]) << 32) | out[1];
  const std::uint64_t b = (std::uint64_t(out[2]) << 32) | out[3];
  // u1 in (0,1], u2 in [0,1)
  const double u1 = (double(a >> 11) + 1.0) * 0x1p-53;
  const double u2 = double(b >> 11) * 0x1p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Uniform in [0,1) keyed the same way; used for subsampling and probe draws.
inline double uniform_draw(std::uint64_t seed, std::uint64_t path,
                           std::uint32_t component, std::uint64_t step) {
  philox::key_t key{std::uint32_t(seed) ^ 0x5851F42Du, std::uint32_t(seed >> 32)};
  philox::ctr_t ctr{std::uint32_t(step), std::uint32_t(step >> 32),
                    std::uint32_t(path) ^ (component << 24),
                    std::uint32_t(path >> 32) ^ (component >> 8)};
  const philox::ctr_t out = philox::block(ctr, key);
  const std::uint64_t a = (std::uint64_t(out[0]) << 32) | out[1];
  return double(a >> 11) * 0x1p-53;
}

}  // namespace fgp
