#ifndef LINKSIM_MODEM_HPP_
#define LINKSIM_MODEM_HPP_

#include <complex>
#include <cstdint>
#include <vector>

namespace linksim {

using cxd = std::complex<double>;

// Gray-mapped M-QAM constellation with unit average symbol energy.
// Square orders (4, 16, 64, 256) map the first half of each label to the
// in-phase rail and the second half to the quadrature rail, each rail
// independently gray coded. Order 2 is the BPSK rail {+1, -1}.
class Constellation {
 public:
  static Constellation qam(int order);

  int order() const { return order_; }
  int bits_per_symbol() const { return bps_; }
  double norm_factor() const { return norm_; }
  const std::vector<cxd>& points() const { return points_; }
  cxd point(unsigned label) const { return points_[label]; }

  // Nearest point in Euclidean distance; exact ties go to the smaller label.
  unsigned nearest_label(cxd y) const;

 private:
  Constellation() = default;
  int order_ = 0;
  int bps_ = 0;
  int side_ = 0;  // levels per rail (0 for order 2)
  double norm_ = 1.0;
  std::vector<cxd> points_;
};

// Per-bit soft information, sign convention: positive means bit 0 is more
// likely. noise_variance is the total complex-dimension variance E|n|^2.
struct LlrFrame {
  std::vector<double> llr;
  double noise_variance = 0.0;
};

enum class LlrMethod { MaxLog, Exact };

std::vector<cxd> qam_modulate(const std::vector<std::uint8_t>& bits, const Constellation& c);
std::vector<std::uint8_t> qam_demod_hard(const std::vector<cxd>& symbols, const Constellation& c);
LlrFrame qam_demod_llr(const std::vector<cxd>& symbols, double noise_variance,
                       const Constellation& c, LlrMethod method = LlrMethod::MaxLog);

std::uint8_t label_bit(unsigned label, int bit_index, int bits_per_symbol);
unsigned bits_to_label(const std::uint8_t* bits, int bits_per_symbol);

double qfunc(double x);

// Es/N0 = Eb/N0 * bits_per_symbol * rate; shared SNR bookkeeping rule.
double ebn0_to_esn0_db(double ebn0_db, int bits_per_symbol, double rate);

// Gray-QAM nearest-neighbor approximation over AWGN (exact for order 2).
double uncoded_ber_awgn(const Constellation& c, double ebn0_db);

// Average BER over diversity_order-branch MRC of iid Rayleigh branches,
// total average combined symbol SNR held equal to the SISO Es/N0.
double uncoded_ber_rayleigh(const Constellation& c, double ebn0_db, int diversity_order);

}  // namespace linksim

#endif  // LINKSIM_MODEM_HPP_
