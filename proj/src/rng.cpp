#include "stefan/rng.hpp"

#include <cmath>
#include <numbers>

namespace stefan {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// (u + 0.5) / 2^32, never 0 or 1
inline double to_unit(std::uint32_t u) { return (static_cast<double>(u) + 0.5) * 0x1p-32; }

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(stream_id + 0x632BE59BD9B4E019ull));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(seed_, splitmix64(stream_id_ * 0x9E3779B97F4A7C15ull + id + 1));
}

std::array<std::uint32_t, 4> RngStream::block(std::uint64_t path, std::uint32_t step,
                                              Purpose purpose) const {
  return philox4x32({step, static_cast<std::uint32_t>(purpose),
                     static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)},
                    key_);
}

std::array<double, 4> RngStream::uniforms(std::uint64_t path, std::uint32_t step,
                                          Purpose purpose) const {
  const auto b = block(path, step, purpose);
  return {to_unit(b[0]), to_unit(b[1]), to_unit(b[2]), to_unit(b[3])};
}

std::array<double, 2> RngStream::uniforms53(std::uint64_t path, std::uint32_t step,
                                            Purpose purpose) const {
  const auto b = block(path, step, purpose);
  auto combine = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1p-53;
  };
  return {combine(b[0], b[1]), combine(b[2], b[3])};
}

std::array<double, 4> RngStream::normals(std::uint64_t path, std::uint32_t step) const {
  const auto u = uniforms(path, step, Purpose::normals);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double r0 = std::sqrt(-2.0 * std::log(u[0]));
  const double r1 = std::sqrt(-2.0 * std::log(u[2]));
  return {r0 * std::cos(two_pi * u[1]), r0 * std::sin(two_pi * u[1]),
          r1 * std::cos(two_pi * u[3]), r1 * std::sin(two_pi * u[3])};
}

}  // namespace stefan
