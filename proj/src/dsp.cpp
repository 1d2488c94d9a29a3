#include "linksim/dsp.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace linksim {
namespace {

// FFTW planning is not thread-safe; executions via fftw_execute_dft are.
// Plans are created once per (size, direction) with FFTW_UNALIGNED so they
// can run on any caller buffer.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cxd> dummy_in(n), dummy_out(n);
    fftw_plan p = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(dummy_in.data()),
        reinterpret_cast<fftw_complex*>(dummy_out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

std::vector<cxd> run(const std::vector<cxd>& x, int sign) {
  if (x.empty()) throw std::invalid_argument("dft: empty input");
  std::vector<cxd> in(x), out(x.size());
  fftw_plan p = cache().get(x.size(), sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cxd> dft(const std::vector<cxd>& x) { return run(x, FFTW_FORWARD); }

std::vector<cxd> idft(const std::vector<cxd>& x) {
  std::vector<cxd> out = run(x, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<cxd> dft_real(const std::vector<double>& x) {
  std::vector<cxd> in(x.begin(), x.end());
  return dft(in);
}

}  // namespace linksim
