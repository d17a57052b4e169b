#include "ictal/rng.hpp"

#include "ictal/error.hpp"

namespace ictal {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view key) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double RngStream::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(*this);
}

std::size_t RngStream::below(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "below(0) has no valid draw");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(*this);
}

RngStream RngStream::split(std::string_view key) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(fnv1a(key))));
}

RngStream RngStream::split(std::uint64_t key) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(key ^ 0x6a09e667f3bcc909ULL)));
}

}  // namespace ictal
