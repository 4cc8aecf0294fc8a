#pragma once

#include <cstdint>
#include <cmath>

namespace acsim {

// Counter-based splittable RNG. Every stream is keyed by
// (seed, realization, step, purpose); draws are a pure function of the key
// and the draw index, so realizations can be generated in any order (or in
// parallel) and still produce identical numbers.
enum class StreamPurpose : std::uint64_t {
  wiener = 0x57u,
  jump_count = 0x4au,
  jump_mark = 0x4du,
  init_field = 0x49u,
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t realization, std::uint64_t step,
            StreamPurpose purpose) {
    std::uint64_t k = detail::mix64(seed);
    k = detail::mix64(k ^ (0x9e6c63d0876a6a31ull * realization));
    k = detail::mix64(k ^ (0xd2b74407b1ce6e93ull * step));
    base_ = detail::mix64(k ^ static_cast<std::uint64_t>(purpose));
  }

  std::uint64_t next_u64() {
    return detail::mix64(base_ + (++counter_) * 0x9e3779b97f4a7c15ull);
  }

  // uniform in (0,1), never exactly 0 or 1
  double uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Knuth's product method; fine for the per-step means used here (<= ~10).
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int count = -1;
    do {
      prod *= uniform();
      ++count;
    } while (prod > limit);
    return count;
  }

 private:
  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace acsim
