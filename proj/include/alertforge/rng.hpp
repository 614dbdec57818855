#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace alertforge {

// Seeded generator with hand-rolled sampling transforms. The standard
// distributions are implementation-defined, which would break bit-exact
// checkpoint replay across standard libraries; mt19937_64 itself is fully
// specified, so everything downstream of it is pinned here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform();

  // Uniform on (0,1]; safe as a log() argument.
  double uniform_pos();

  // Standard normal via Box-Muller (cosine branch only, no cached spare).
  double normal();

  // Uniform integer in [0,n), n >= 1.
  std::size_t bounded(std::size_t n);

  // k distinct indices from [0,n) when k <= n, otherwise k draws with
  // replacement. Order is the draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

  std::string save_state() const;
  void restore_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

// Stable mix of a base seed and a stream index, for derived generators.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace alertforge
