#pragma once

#include <array>
#include <cstdint>

namespace ssid {

// Philox4x32-10 counter-based generator. A (key, counter) pair maps to four
// 32-bit words; streams are cheap to split by key and reproducible regardless
// of threading.
struct Philox4x32 {
  uint64_t key;

  std::array<uint32_t, 4> block(uint64_t counter) const;
};

// splitmix64 hash used to derive per-run keys from (base_seed, run index).
uint64_t splitmix64(uint64_t x);
uint64_t derive_seed(uint64_t base_seed, uint64_t index);

// Standard-normal stream: Box-Muller over Philox uniforms. One counter block
// yields two variates; the stream is stateful but the state is just the
// counter, so identical seeds give identical sequences.
class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed) : gen_{seed} {}

  double next();

  static constexpr const char* algorithm() { return "philox4x32-10/box-muller"; }

 private:
  Philox4x32 gen_;
  uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace ssid
