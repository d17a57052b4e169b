#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace ictal {

/// Seeded pseudorandom stream backed by std::mt19937_64.
///
/// Child streams come from key-splitting: the child seed mixes the parent
/// seed with a hash of the key through splitmix64, so a child depends only on
/// (parent seed, key) and never on how many draws the parent has made.
/// Satisfies UniformRandomBitGenerator, so <random> distributions and
/// std::shuffle accept it directly.
class RngStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view algorithm_id =
      "mt19937_64+splitmix64-keysplit";

  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    ++draws_;
    return engine_();
  }

  // 53-bit resolution uniform draw in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::size_t below(std::size_t n);

  RngStream split(std::string_view key) const;
  RngStream split(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ictal
