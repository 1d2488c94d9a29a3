#ifndef LINKSIM_STBC_HPP_
#define LINKSIM_STBC_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "linksim/channel.hpp"
#include "linksim/modem.hpp"
#include "linksim/rng.hpp"

namespace linksim {

enum class StbcName { None, G2, G3 };

struct StbcScheme {
  StbcName name = StbcName::None;
  int n_tx = 1;
  int slots = 1;
  int symbols = 1;

  double rate() const { return static_cast<double>(symbols) / slots; }
  static StbcScheme make(StbcName name);
  static StbcScheme from_string(const std::string& s);
  const char* label() const;
};

// slots x n_tx; entry (t, i) is the transmit-antenna-i signal in slot t.
using SpaceTimeBlock = Eigen::MatrixXcd;

struct ReceivedFrame {
  Eigen::MatrixXcd r;           // slots x n_rx
  double noise_variance = 0.0;  // total complex variance per entry
};

SpaceTimeBlock stbc_encode(const std::vector<cxd>& symbols, const StbcScheme& scheme);

// r = C H^T + noise. Noise is iid complex Gaussian with total complex
// variance n_tx/SNR per entry (n_tx/(2 SNR) per real dimension).
ReceivedFrame apply_channel(const SpaceTimeBlock& block, const ChannelMatrix& h, double snr,
                            RandomStream& rng);

// Same reception model with the noise variance given directly;
// variance 0 disables noise.
ReceivedFrame apply_channel_var(const SpaceTimeBlock& block, const ChannelMatrix& h,
                                double noise_variance, RandomStream* rng);

// Decision metric: sum_t sum_j | r_tj - sum_i h_ji c_ti |^2.
double ml_metric(const ReceivedFrame& frame, const ChannelMatrix& h,
                 const SpaceTimeBlock& candidate);

struct DetectionResult {
  std::vector<cxd> symbols;        // sliced constellation points
  std::vector<unsigned> labels;
  std::vector<cxd> soft;           // gain-normalized statistics, approx x_k + noise
  double gain = 0.0;               // equivalent combining gain (sum |h|^2, x2 for G3)
};

// Linear orthogonal combining followed by independent per-symbol slicing.
// tx_scale is the amplitude scale applied to symbols before encoding.
DetectionResult stbc_detect(const ReceivedFrame& frame, const ChannelMatrix& h,
                            const StbcScheme& scheme, const Constellation& c,
                            double tx_scale = 1.0);

}  // namespace linksim

#endif  // LINKSIM_STBC_HPP_
