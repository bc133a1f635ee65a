#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tl1 {

// Seeded substream generator. The draw sequence is fully determined by
// (master_seed, stream_id); distinct stream ids give statistically
// independent substreams, so experiment trials can run in parallel and
// still reproduce bit for bit.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
      : master_seed_(master_seed), stream_id_(stream_id) {
    std::uint64_t s = master_seed + 0x9e3779b97f4a7c15ULL * stream_id;
    const std::uint64_t w0 = split_mix(s);
    const std::uint64_t w1 = split_mix(s);
    const std::uint64_t w2 = split_mix(s);
    std::seed_seq seq{static_cast<std::uint32_t>(w0),
                      static_cast<std::uint32_t>(w0 >> 32),
                      static_cast<std::uint32_t>(w1),
                      static_cast<std::uint32_t>(w1 >> 32),
                      static_cast<std::uint32_t>(w2),
                      static_cast<std::uint32_t>(w2 >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform draw on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform draw on the open interval (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  /// Standard normal draw (Box-Muller, pairs cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.14159265358979323846 * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  /// Unbiased uniform integer in [0, n), n >= 1.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static std::uint64_t split_mix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tl1
