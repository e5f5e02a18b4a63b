#pragma once

#include <cstdint>
#include <vector>

namespace evrp {

// splitmix64 stream; self-contained so results are identical across
// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : s_(seed) {}

  uint64_t u64() {
    uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n > 0.
  int below(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(u64()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
  }

  // Uniform in [lo, hi] inclusive.
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }

  double real01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  double real(double lo, double hi) { return lo + (hi - lo) * real01(); }

  bool chance(double p) { return real01() < p; }

  template <class T>
  void shuffle(std::vector<T> &v) {
    for (size_t i = v.size(); i > 1; i--) {
      size_t j = static_cast<size_t>(below(static_cast<int>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derived independent stream; deterministic in (current state, salt).
  Rng child(uint64_t salt) {
    uint64_t z = s_ ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    return Rng(z ^ (z >> 33));
  }

 private:
  uint64_t s_;
};

}  // namespace evrp
