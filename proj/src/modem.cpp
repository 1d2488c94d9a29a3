#include "linksim/modem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linksim/errors.hpp"

namespace linksim {
namespace {

bool is_power_of_four(int m) {
  if (m < 4) return false;
  while (m > 1) {
    if (m % 4 != 0) return false;
    m /= 4;
  }
  return true;
}

// Binary-reflected gray decode: gray index -> natural level index.
unsigned gray_decode(unsigned g) {
  unsigned b = g;
  for (unsigned shift = 1; shift < 16; shift <<= 1) b ^= b >> shift;
  return b;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

}  // namespace

std::uint8_t label_bit(unsigned label, int bit_index, int bits_per_symbol) {
  return static_cast<std::uint8_t>((label >> (bits_per_symbol - 1 - bit_index)) & 1u);
}

unsigned bits_to_label(const std::uint8_t* bits, int bits_per_symbol) {
  unsigned label = 0;
  for (int j = 0; j < bits_per_symbol; ++j) label = (label << 1) | (bits[j] & 1u);
  return label;
}

Constellation Constellation::qam(int order) {
  if (order != 2 && !is_power_of_four(order))
    throw ConfigError("constellation order must be 2 or a power of 4, got " +
                      std::to_string(order));
  if (order > 256) throw ConfigError("constellation order above 256 is not supported");

  Constellation c;
  c.order_ = order;
  c.bps_ = 0;
  for (int m = order; m > 1; m >>= 1) ++c.bps_;

  if (order == 2) {
    c.side_ = 0;
    c.norm_ = 1.0;
    c.points_ = {cxd(1.0, 0.0), cxd(-1.0, 0.0)};
    return c;
  }

  const int side = 1 << (c.bps_ / 2);
  c.side_ = side;
  // Mean energy of the {±1, ±3, ...} lattice is 2(side^2 - 1)/3.
  c.norm_ = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
  c.points_.resize(order);
  const int half = c.bps_ / 2;
  for (int label = 0; label < order; ++label) {
    const unsigned gi = static_cast<unsigned>(label) >> half;
    const unsigned gq = static_cast<unsigned>(label) & ((1u << half) - 1u);
    const int ii = static_cast<int>(gray_decode(gi));
    const int iq = static_cast<int>(gray_decode(gq));
    const double re = 2.0 * ii - (side - 1);
    const double im = 2.0 * iq - (side - 1);
    c.points_[label] = cxd(re * c.norm_, im * c.norm_);
  }
  return c;
}

unsigned Constellation::nearest_label(cxd y) const {
  unsigned best = 0;
  double best_d = std::norm(y - points_[0]);
  for (unsigned l = 1; l < points_.size(); ++l) {
    const double d = std::norm(y - points_[l]);
    if (d < best_d) {
      best_d = d;
      best = l;
    }
    // Equal distance keeps the smaller label (scan order is ascending).
  }
  return best;
}

std::vector<cxd> qam_modulate(const std::vector<std::uint8_t>& bits, const Constellation& c) {
  const int m = c.bits_per_symbol();
  if (bits.size() % static_cast<std::size_t>(m) != 0)
    throw std::invalid_argument("qam_modulate: bit count " + std::to_string(bits.size()) +
                                " not divisible by " + std::to_string(m));
  std::vector<cxd> out(bits.size() / m);
  for (std::size_t s = 0; s < out.size(); ++s)
    out[s] = c.point(bits_to_label(bits.data() + s * m, m));
  return out;
}

std::vector<std::uint8_t> qam_demod_hard(const std::vector<cxd>& symbols,
                                         const Constellation& c) {
  const int m = c.bits_per_symbol();
  std::vector<std::uint8_t> out(symbols.size() * m);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const unsigned label = c.nearest_label(symbols[s]);
    for (int j = 0; j < m; ++j) out[s * m + j] = label_bit(label, j, m);
  }
  return out;
}

LlrFrame qam_demod_llr(const std::vector<cxd>& symbols, double noise_variance,
                       const Constellation& c, LlrMethod method) {
  if (!(noise_variance > 0.0))
    throw std::invalid_argument("qam_demod_llr: noise_variance must be > 0");
  const int m = c.bits_per_symbol();
  const auto& pts = c.points();
  LlrFrame frame;
  frame.noise_variance = noise_variance;
  frame.llr.resize(symbols.size() * m);

  std::vector<double> d2(pts.size());
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    for (std::size_t l = 0; l < pts.size(); ++l) d2[l] = std::norm(symbols[s] - pts[l]);
    for (int j = 0; j < m; ++j) {
      if (method == LlrMethod::MaxLog) {
        double min0 = INFINITY, min1 = INFINITY;
        for (std::size_t l = 0; l < pts.size(); ++l) {
          if (label_bit(static_cast<unsigned>(l), j, m))
            min1 = std::min(min1, d2[l]);
          else
            min0 = std::min(min0, d2[l]);
        }
        frame.llr[s * m + j] = (min1 - min0) / noise_variance;
      } else {
        // log-sum-exp over each bit class, stabilized by the class minimum
        double min0 = INFINITY, min1 = INFINITY;
        for (std::size_t l = 0; l < pts.size(); ++l) {
          if (label_bit(static_cast<unsigned>(l), j, m))
            min1 = std::min(min1, d2[l]);
          else
            min0 = std::min(min0, d2[l]);
        }
        double sum0 = 0.0, sum1 = 0.0;
        for (std::size_t l = 0; l < pts.size(); ++l) {
          if (label_bit(static_cast<unsigned>(l), j, m))
            sum1 += std::exp(-(d2[l] - min1) / noise_variance);
          else
            sum0 += std::exp(-(d2[l] - min0) / noise_variance);
        }
        frame.llr[s * m + j] =
            (min1 - min0) / noise_variance + std::log(sum0) - std::log(sum1);
      }
    }
  }
  return frame;
}

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double ebn0_to_esn0_db(double ebn0_db, int bits_per_symbol, double rate) {
  return ebn0_db + 10.0 * std::log10(bits_per_symbol * rate);
}

double uncoded_ber_awgn(const Constellation& c, double ebn0_db) {
  if (!std::isfinite(ebn0_db)) throw std::invalid_argument("uncoded_ber_awgn: Eb/N0 not finite");
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  const int m = c.bits_per_symbol();
  const int order = c.order();
  if (order == 2) return qfunc(std::sqrt(2.0 * ebn0));
  const double a = (4.0 / m) * (1.0 - 1.0 / std::sqrt(static_cast<double>(order)));
  return a * qfunc(std::sqrt(3.0 * m * ebn0 / (order - 1)));
}

double uncoded_ber_rayleigh(const Constellation& c, double ebn0_db, int diversity_order) {
  if (diversity_order < 1)
    throw std::invalid_argument("uncoded_ber_rayleigh: diversity_order must be >= 1");
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  const int m = c.bits_per_symbol();
  const int order = c.order();
  // Nearest-neighbor term a * Q(sqrt(2 g gamma)); per-branch mean SNR is
  // the SISO symbol SNR split evenly over the branches.
  double a, g;
  if (order == 2) {
    a = 1.0;
    g = 1.0;
  } else {
    a = (4.0 / m) * (1.0 - 1.0 / std::sqrt(static_cast<double>(order)));
    g = 1.5 / (order - 1);
  }
  const double gamma_s = m * ebn0;
  const double gamma_b = gamma_s / diversity_order;
  const double mu = std::sqrt(g * gamma_b / (1.0 + g * gamma_b));
  const int d = diversity_order;
  double sum = 0.0;
  for (int k = 0; k < d; ++k) sum += binom(d - 1 + k, k) * std::pow((1.0 + mu) / 2.0, k);
  return a * std::pow((1.0 - mu) / 2.0, d) * sum;
}

}  // namespace linksim
