#ifndef RQMC_RNG_HPP
#define RQMC_RNG_HPP

#include <cstdint>
#include <string_view>

namespace rqmc {

// Counter-based PRNG: the n-th output is a pure function of (key, n).
// Mixing is splitmix64 (Steele et al. 2014); streams with distinct keys
// are independent for all practical purposes.
inline constexpr std::string_view kPrngName = "splitmix64-counter";

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child key from a parent key and a label, for nested seed
// streams such as (master_seed, proposal, N, replicate).
inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t label) {
  return mix64(key ^ mix64(label + 0x632be59bd9b4e019ULL));
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform draw strictly inside (0,1).
  double next_double() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rqmc

#endif
