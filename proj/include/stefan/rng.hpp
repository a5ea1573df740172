#pragma once

#include <array>
#include <cstdint>

namespace stefan {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Draw purposes. Each (path, step, purpose) triple owns one Philox block.
enum class Purpose : std::uint32_t { normals = 0, bridge = 1, start = 2, aux = 3 };

/// A keyed family of counter-based substreams. Every draw is a pure function of
/// (seed, stream id, path index, step index, purpose), so results do not depend
/// on how paths are scheduled across workers.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent stream derived from this one; used per query / per phase.
  RngStream substream(std::uint64_t id) const;

  std::array<std::uint32_t, 4> block(std::uint64_t path, std::uint32_t step,
                                     Purpose purpose) const;

  /// Four uniforms in the open interval (0, 1) at 32-bit resolution.
  std::array<double, 4> uniforms(std::uint64_t path, std::uint32_t step,
                                 Purpose purpose) const;

  /// Two uniforms in (0, 1) at 53-bit resolution.
  std::array<double, 2> uniforms53(std::uint64_t path, std::uint32_t step,
                                   Purpose purpose) const;

  /// Four standard normals via Box-Muller.
  std::array<double, 4> normals(std::uint64_t path, std::uint32_t step) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_;
};

}  // namespace stefan
