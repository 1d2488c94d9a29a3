#ifndef LINKSIM_RNG_HPP_
#define LINKSIM_RNG_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace linksim {

using cxd = std::complex<double>;

// SplitMix64 finalizer; used to derive independent stream seeds from
// (master_seed, counter...) tuples so parallel and serial runs agree.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ (a + 0x9e3779b97f4a7c15ULL));
  s = mix64(s ^ (b + 0xbf58476d1ce4e5b9ULL));
  return s;
}

// Deterministic random stream. Uniform/Gaussian conversion is done
// explicitly (not via std distributions, whose algorithms are
// implementation-defined) so identical seeds give identical draws on
// any standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  static RandomStream for_counter(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return RandomStream(derive_seed(master, a, b));
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = total_variance.
  cxd cgaussian(double total_variance) {
    const double s = std::sqrt(total_variance / 2.0);
    return {s * gaussian(), s * gaussian()};
  }

  bool bit() { return (gen_() >> 63) != 0; }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace linksim

#endif  // LINKSIM_RNG_HPP_
