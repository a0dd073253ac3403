#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

namespace dwrl {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic random stream. All sampling helpers are stateless beyond the
// engine itself, so serializing the engine captures the full stream state
// (std::normal_distribution-style caching is deliberately avoided).
class RngStream {
 public:
  RngStream() : eng_(0) {}
  explicit RngStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  // Independent stream derived from a master seed and a role name.
  static RngStream named(std::uint64_t seed, std::string_view name) {
    RngStream s;
    s.eng_.seed(splitmix64(seed ^ fnv1a64(name)));
    return s;
  }

  std::uint64_t raw() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; draws two uniforms per call, no caching.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in [0, n), n > 0.
  std::int64_t randint(std::int64_t n) {
    return static_cast<std::int64_t>(
        (static_cast<unsigned __int128>(raw()) * static_cast<unsigned __int128>(n)) >> 64);
  }

  std::string serialize() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }

  static RngStream deserialize(const std::string& text) {
    RngStream s;
    std::istringstream is(text);
    is >> s.eng_;
    return s;
  }

  bool operator==(const RngStream& other) const { return eng_ == other.eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace dwrl
