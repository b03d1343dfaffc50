#pragma once

#include <array>
#include <cstdint>

namespace beltrami {

/// Philox4x32-10 counter-based generator. Every output block is a pure
/// function of (key, counter), so draws can be addressed directly by the
/// index of the quantity they feed.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Two independent standard normals addressed by a 64-bit seed and a
/// 128-bit counter.
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t c0, std::uint32_t c1,
                                  std::uint32_t c2, std::uint32_t c3);

/// Sequential stream over consecutive counters; stream ids keep
/// independent consumers apart.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t domain, std::uint64_t stream);
  double next();
  double uniform();  // (0,1)

 private:
  void refill();
  std::array<std::uint32_t, 2> key_;
  std::uint32_t domain_;
  std::uint64_t stream_;
  std::uint32_t block_ = 0;
  std::array<double, 2> normals_{};
  std::array<double, 2> uniforms_{};
  int normal_pos_ = 2;
  int uniform_pos_ = 2;
  std::uint32_t uniform_block_ = 0;
};

// Domain tags keep unrelated uses of one seed statistically independent.
enum RngDomain : std::uint32_t {
  kDomainCoefficients = 1,
  kDomainMonteCarlo = 2,
  kDomainTorus = 3,
  kDomainSynthetic = 4,
};

double uniform_from_bits(std::uint32_t hi, std::uint32_t lo);

}  // namespace beltrami
