#ifndef LINKSIM_DSP_HPP_
#define LINKSIM_DSP_HPP_

#include <complex>
#include <vector>

namespace linksim {

using cxd = std::complex<double>;

// Forward DFT: X[k] = sum_n x[n] exp(-j 2 pi k n / N).
std::vector<cxd> dft(const std::vector<cxd>& x);

// Inverse DFT including the 1/N factor.
std::vector<cxd> idft(const std::vector<cxd>& x);

std::vector<cxd> dft_real(const std::vector<double>& x);

}  // namespace linksim

#endif  // LINKSIM_DSP_HPP_
