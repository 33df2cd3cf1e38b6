// Reproducible random number streams for trial simulation.
//
// All stochastic code in this library draws from SplitMix64 streams whose
// seeds are derived with substream(): a stateless mix of (root, index).
// Work items (patients, replicates, null simulations) each own an indexed
// stream, so results are a pure function of the root seed regardless of
// evaluation order or thread count.
#pragma once

#include <cstdint>

namespace wta {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit mantissa.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on the integers {lo, ..., hi}, hi >= lo.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const auto wide = static_cast<unsigned __int128>(next());
    return lo + static_cast<int>((wide * span) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t state_;
};

// Seed for the index-th child stream of root. Children are statistically
// independent of each other and of the parent.
inline std::uint64_t substream(std::uint64_t root, std::uint64_t index) {
  SplitMix64 g(root ^ ((index + 1) * 0xD1B54A32D192ED03ull));
  g.next();
  return g.next();
}

}  // namespace wta
