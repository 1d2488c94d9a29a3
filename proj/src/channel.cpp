#include "linksim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "linksim/errors.hpp"

namespace linksim {

void ArrayGeometry::validate() const {
  if (n_t < 1 || n_r < 1) throw ConfigError("array geometry: antenna counts must be >= 1");
  if (!(delta_t() > 0.0) || !(delta_r() > 0.0))
    throw ConfigError("array geometry: normalized spacings must be > 0");
  if (!(lambda_c > 0.0)) throw ConfigError("array geometry: wavelength must be > 0");
}

void DopplerParams::validate() const {
  if (!(c1.sigma_hz > 0.0) || !(c2.sigma_hz > 0.0))
    throw ConfigError("doppler: component standard deviations must be > 0");
  if (c1.gain < 0.0 || c2.gain < 0.0) throw ConfigError("doppler: gains must be >= 0");
  if (!(c1.gain + c2.gain > 0.0)) throw ConfigError("doppler: total gain must be > 0");
}

ChannelMatrix rayleigh_realization(int n_rx, int n_tx, RandomStream& rng) {
  ChannelMatrix h(n_rx, n_tx);
  for (int j = 0; j < n_rx; ++j)
    for (int i = 0; i < n_tx; ++i) h(j, i) = rng.cgaussian(1.0);
  return h;
}

Eigen::VectorXcd spatial_signature(double omega, int n, double delta) {
  if (std::abs(omega) > 1.0)
    throw std::invalid_argument("spatial_signature: |directional cosine| must be <= 1");
  if (n < 1) throw std::invalid_argument("spatial_signature: n must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("spatial_signature: spacing must be > 0");
  Eigen::VectorXcd e(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    const double phase = -2.0 * M_PI * k * delta * omega;
    e(k) = scale * cxd(std::cos(phase), std::sin(phase));
  }
  return e;
}

ChannelMatrix geometric_channel(const std::vector<PathSpec>& paths, const ArrayGeometry& geom) {
  geom.validate();
  if (paths.empty()) throw std::invalid_argument("geometric_channel: path list is empty");
  ChannelMatrix h = ChannelMatrix::Zero(geom.n_r, geom.n_t);
  const double root_nn = std::sqrt(static_cast<double>(geom.n_t) * geom.n_r);
  for (const PathSpec& p : paths) {
    if (std::abs(p.tx_cos) > 1.0 || std::abs(p.rx_cos) > 1.0)
      throw std::invalid_argument("geometric_channel: |directional cosine| must be <= 1");
    const double phase = -2.0 * M_PI * p.distance_m / geom.lambda_c;
    const cxd ab = p.attenuation * root_nn * cxd(std::cos(phase), std::sin(phase));
    const Eigen::VectorXcd er = spatial_signature(p.rx_cos, geom.n_r, geom.delta_r());
    const Eigen::VectorXcd et = spatial_signature(p.tx_cos, geom.n_t, geom.delta_t());
    h += ab * er * et.adjoint();
  }
  return h;
}

std::vector<cxd> awgn(const std::vector<cxd>& signal, double variance, RandomStream& rng) {
  if (!(variance > 0.0)) throw std::invalid_argument("awgn: variance must be > 0");
  std::vector<cxd> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i] + rng.cgaussian(variance);
  return out;
}

double doppler_psd(double f_hz, const DopplerParams& p) {
  p.validate();
  double acc = 0.0;
  for (const auto* c : {&p.c1, &p.c2}) {
    const double d = f_hz - c->center_hz;
    acc += c->gain / std::sqrt(2.0 * M_PI * c->sigma_hz * c->sigma_hz) *
           std::exp(-d * d / (2.0 * c->sigma_hz * c->sigma_hz));
  }
  return acc / (p.c1.gain + p.c2.gain);
}

}  // namespace linksim
