#include "beltrami/rng.hpp"

#include <cmath>
#include <numbers>

namespace beltrami {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::array<std::uint32_t, 2> split_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
  // 53 random bits, shifted by half an ulp so the result is never 0.
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1p-53;
}

namespace {
std::array<double, 2> box_muller(const std::array<std::uint32_t, 4>& b) {
  const double u1 = uniform_from_bits(b[0], b[1]);
  const double u2 = uniform_from_bits(b[2], b[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}
}  // namespace

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t c0, std::uint32_t c1,
                                  std::uint32_t c2, std::uint32_t c3) {
  return box_muller(philox4x32({c0, c1, c2, c3}, split_seed(seed)));
}

NormalStream::NormalStream(std::uint64_t seed, std::uint32_t domain, std::uint64_t stream)
    : key_(split_seed(seed)), domain_(domain), stream_(stream) {}

void NormalStream::refill() {
  const auto b = philox4x32({block_++, static_cast<std::uint32_t>(stream_),
                             static_cast<std::uint32_t>(stream_ >> 32), domain_},
                            key_);
  normals_ = box_muller(b);
  normal_pos_ = 0;
}

double NormalStream::next() {
  if (normal_pos_ == 2) refill();
  return normals_[normal_pos_++];
}

double NormalStream::uniform() {
  if (uniform_pos_ == 2) {
    // Uniform draws use the high half of the block counter space.
    const auto b = philox4x32({0x80000000u | uniform_block_++, static_cast<std::uint32_t>(stream_),
                               static_cast<std::uint32_t>(stream_ >> 32), domain_},
                              key_);
    uniforms_ = {uniform_from_bits(b[0], b[1]), uniform_from_bits(b[2], b[3])};
    uniform_pos_ = 0;
  }
  return uniforms_[uniform_pos_++];
}

}  // namespace beltrami
