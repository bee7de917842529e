#ifndef PRUNELAB_RNG_HPP
#define PRUNELAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace prunelab {

// Counter-based random stream (splitmix64). Streams are keyed by a seed plus
// a purpose tag, so independent consumers (init, shuffling, random scores,
// data synthesis) never share state and parallel runs stay reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (key_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; caches the second deviate.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}
}  // namespace detail

// Derives a stream key from (seed, tag, salt...). FNV-1a over the tag bytes,
// then the salts folded in.
inline std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                                std::initializer_list<std::uint64_t> salt = {}) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h = detail::mix64(h, seed);
  for (std::uint64_t s : salt) h = detail::mix64(h, s);
  return h;
}

inline RngStream make_stream(std::uint64_t seed, std::string_view tag,
                             std::initializer_list<std::uint64_t> salt = {}) {
  return RngStream(derive_key(seed, tag, salt));
}

// In-place Fisher-Yates shuffle.
template <typename T>
void fisher_yates(std::vector<T>& items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace prunelab

#endif
