#ifndef LINKSIM_CHANNEL_HPP_
#define LINKSIM_CHANNEL_HPP_

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "linksim/rng.hpp"

namespace linksim {

// Entry (j, i) is the flat-fading gain from transmit antenna i to receive
// antenna j.
using ChannelMatrix = Eigen::MatrixXcd;

// Uniform linear arrays, spacings normalized by the carrier wavelength.
struct ArrayGeometry {
  int n_t = 1;
  int n_r = 1;
  double length_t = 0.5;   // normalized array lengths
  double length_r = 0.5;
  double lambda_c = 0.15;  // carrier wavelength in meters

  double delta_t() const { return length_t / n_t; }
  double delta_r() const { return length_r / n_r; }
  void validate() const;
};

struct PathSpec {
  cxd attenuation{1.0, 0.0};
  double tx_cos = 0.0;     // directional cosine at the transmit array
  double rx_cos = 0.0;     // directional cosine at the receive array
  double distance_m = 0.0; // reference distance along the path
};

// Two-component Gaussian Doppler spectrum (COST207 urban long-echo shape).
struct DopplerParams {
  struct Component {
    double center_hz = 0.0;
    double gain = 1.0;
    double sigma_hz = 1.0;
  };
  Component c1, c2;
  void validate() const;
};

// iid CN(0,1) entries; |entry| is Rayleigh with sigma = 1/sqrt(2).
ChannelMatrix rayleigh_realization(int n_rx, int n_tx, RandomStream& rng);

// Unit-norm array response: k-th entry exp(-j 2 pi k delta omega)/sqrt(n).
Eigen::VectorXcd spatial_signature(double omega, int n, double delta);

ChannelMatrix geometric_channel(const std::vector<PathSpec>& paths, const ArrayGeometry& geom);

// Adds circularly symmetric complex Gaussian noise with E|n|^2 = variance.
std::vector<cxd> awgn(const std::vector<cxd>& signal, double variance, RandomStream& rng);

double doppler_psd(double f_hz, const DopplerParams& p);

}  // namespace linksim

#endif  // LINKSIM_CHANNEL_HPP_
