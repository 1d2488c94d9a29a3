#include "linksim/stbc.hpp"

#include <cmath>
#include <stdexcept>

#include "linksim/errors.hpp"

namespace linksim {

StbcScheme StbcScheme::make(StbcName name) {
  switch (name) {
    case StbcName::None: return {StbcName::None, 1, 1, 1};
    case StbcName::G2: return {StbcName::G2, 2, 2, 2};
    case StbcName::G3: return {StbcName::G3, 3, 8, 4};
  }
  throw std::logic_error("unknown STBC scheme");
}

StbcScheme StbcScheme::from_string(const std::string& s) {
  if (s == "none") return make(StbcName::None);
  if (s == "g2") return make(StbcName::G2);
  if (s == "g3") return make(StbcName::G3);
  throw ConfigError("stbc scheme must be one of none|g2|g3, got '" + s + "'");
}

const char* StbcScheme::label() const {
  switch (name) {
    case StbcName::None: return "none";
    case StbcName::G2: return "g2";
    case StbcName::G3: return "g3";
  }
  return "?";
}

SpaceTimeBlock stbc_encode(const std::vector<cxd>& x, const StbcScheme& scheme) {
  if (static_cast<int>(x.size()) != scheme.symbols)
    throw std::invalid_argument("stbc_encode: expected " + std::to_string(scheme.symbols) +
                                " symbols, got " + std::to_string(x.size()));
  SpaceTimeBlock c(scheme.slots, scheme.n_tx);
  switch (scheme.name) {
    case StbcName::None:
      c(0, 0) = x[0];
      break;
    case StbcName::G2:
      c(0, 0) = x[0];
      c(0, 1) = x[1];
      c(1, 0) = -std::conj(x[1]);
      c(1, 1) = std::conj(x[0]);
      break;
    case StbcName::G3: {
      // Slots I-IV, then their conjugates in slots V-VIII.
      c(0, 0) = x[0];  c(0, 1) = x[1];  c(0, 2) = x[2];
      c(1, 0) = -x[1]; c(1, 1) = x[0];  c(1, 2) = -x[3];
      c(2, 0) = -x[2]; c(2, 1) = x[3];  c(2, 2) = x[0];
      c(3, 0) = -x[3]; c(3, 1) = -x[2]; c(3, 2) = x[1];
      for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 3; ++i) c(4 + t, i) = std::conj(c(t, i));
      break;
    }
  }
  return c;
}

ReceivedFrame apply_channel_var(const SpaceTimeBlock& block, const ChannelMatrix& h,
                                double noise_variance, RandomStream* rng) {
  if (h.cols() != block.cols())
    throw std::invalid_argument("apply_channel: channel has " + std::to_string(h.cols()) +
                                " tx columns, block has " + std::to_string(block.cols()));
  if (noise_variance < 0.0)
    throw std::invalid_argument("apply_channel: noise variance must be >= 0");
  ReceivedFrame f;
  f.r = block * h.transpose();
  f.noise_variance = noise_variance;
  if (noise_variance > 0.0) {
    if (!rng) throw std::invalid_argument("apply_channel: rng required when noise is enabled");
    for (Eigen::Index t = 0; t < f.r.rows(); ++t)
      for (Eigen::Index j = 0; j < f.r.cols(); ++j) f.r(t, j) += rng->cgaussian(noise_variance);
  }
  return f;
}

ReceivedFrame apply_channel(const SpaceTimeBlock& block, const ChannelMatrix& h, double snr,
                            RandomStream& rng) {
  if (!(snr > 0.0)) throw std::invalid_argument("apply_channel: SNR must be > 0");
  const double variance = static_cast<double>(block.cols()) / snr;
  return apply_channel_var(block, h, variance, &rng);
}

double ml_metric(const ReceivedFrame& frame, const ChannelMatrix& h,
                 const SpaceTimeBlock& candidate) {
  if (h.cols() != candidate.cols() || frame.r.rows() != candidate.rows() ||
      frame.r.cols() != h.rows())
    throw std::invalid_argument("ml_metric: inconsistent shapes");
  return (frame.r - candidate * h.transpose()).squaredNorm();
}

namespace {

// Real-valued observation model for a linear orthogonal design: stacking
// re/im of the received block gives r_vec = G theta + n with theta the
// re/im parts of the symbols. Orthogonality makes G^T G = gain * I, so the
// matched filter G^T r / gain is the exact per-symbol ML statistic.
Eigen::MatrixXd design_matrix(const StbcScheme& scheme, const ChannelMatrix& h,
                              double tx_scale) {
  const int k = scheme.symbols;
  const Eigen::Index rows = 2 * scheme.slots * h.rows();
  Eigen::MatrixXd g(rows, 2 * k);
  std::vector<cxd> basis(static_cast<std::size_t>(k), cxd(0.0, 0.0));
  for (int p = 0; p < 2 * k; ++p) {
    basis[p / 2] = (p % 2 == 0) ? cxd(1.0, 0.0) : cxd(0.0, 1.0);
    const Eigen::MatrixXcd y = (stbc_encode(basis, scheme) * tx_scale) * h.transpose();
    basis[p / 2] = cxd(0.0, 0.0);
    Eigen::Index row = 0;
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      for (Eigen::Index t = 0; t < y.rows(); ++t) {
        g(row++, p) = y(t, j).real();
        g(row++, p) = y(t, j).imag();
      }
  }
  return g;
}

}  // namespace

DetectionResult stbc_detect(const ReceivedFrame& frame, const ChannelMatrix& h,
                            const StbcScheme& scheme, const Constellation& c,
                            double tx_scale) {
  if (h.cols() != scheme.n_tx || frame.r.rows() != scheme.slots || frame.r.cols() != h.rows())
    throw std::invalid_argument("stbc_detect: inconsistent shapes");
  const Eigen::MatrixXd g = design_matrix(scheme, h, tx_scale);
  const double gain = g.col(0).squaredNorm();
  if (!(gain > 0.0)) throw DegenerateChannelError("stbc_detect: all-zero channel matrix");

  Eigen::VectorXd r_vec(g.rows());
  Eigen::Index row = 0;
  for (Eigen::Index j = 0; j < frame.r.cols(); ++j)
    for (Eigen::Index t = 0; t < frame.r.rows(); ++t) {
      r_vec(row++) = frame.r(t, j).real();
      r_vec(row++) = frame.r(t, j).imag();
    }
  const Eigen::VectorXd theta = (g.transpose() * r_vec) / gain;

  DetectionResult out;
  out.gain = gain / (tx_scale * tx_scale);
  out.soft.resize(scheme.symbols);
  out.symbols.resize(scheme.symbols);
  out.labels.resize(scheme.symbols);
  for (int k = 0; k < scheme.symbols; ++k) {
    out.soft[k] = cxd(theta(2 * k), theta(2 * k + 1));
    out.labels[k] = c.nearest_label(out.soft[k]);
    out.symbols[k] = c.point(out.labels[k]);
  }
  return out;
}

}  // namespace linksim
