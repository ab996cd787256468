#pragma once

#include <cstdint>

namespace mb {

// Counter-based splittable generator built on the splitmix64 finalizer.
// A stream is identified by a 64-bit key; draw number t of the stream is
// mix(key + t*GAMMA).  Any draw is addressable without advancing shared
// state, so runs are reproducible under any thread schedule: the value of
// draw t for (seed, item) never depends on who asked first.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x8e8c2b0f245a6f0dULL)) {}

  // Independent child stream; children with distinct salts do not collide
  // with each other or with draws of the parent stream.
  Rng split(std::uint64_t salt) const {
    return Rng(from_key{}, mix(key_ ^ mix(salt + 0x6a09e667f3bcc909ULL)));
  }

  // Random access: draw number t of this stream.
  std::uint64_t at(std::uint64_t t) const { return mix(key_ + t * GAMMA); }

  double uniform_at(std::uint64_t t) const { return to_unit(at(t)); }

  // Sequential interface for callers that just want a stream.
  std::uint64_t next() { return at(ctr_++); }
  double uniform() { return to_unit(next()); }

  // uniform integer in [0, n) without materializing a distribution object
  std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
  struct from_key {};
  Rng(from_key, std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t GAMMA = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  static double to_unit(std::uint64_t v) {
    return static_cast<double>(v >> 11) * 0x1.0p-53;
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace mb
