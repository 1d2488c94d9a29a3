#include <doctest.h>

#include <cmath>
#include <vector>

#include "linksim/errors.hpp"
#include "linksim/stbc.hpp"

using namespace linksim;

namespace {

// Exhaustive minimization of the decision metric over all candidate
// symbol tuples; the detection oracle.
std::vector<unsigned> brute_force_detect(const ReceivedFrame& frame, const ChannelMatrix& h,
                                         const StbcScheme& scheme, const Constellation& c,
                                         double tx_scale) {
  const int k = scheme.symbols;
  const unsigned m = static_cast<unsigned>(c.order());
  std::vector<unsigned> labels(k, 0), best(k, 0);
  double best_metric = INFINITY;
  std::vector<cxd> syms(k);
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) total *= m;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t v = code;
    for (int i = 0; i < k; ++i) {
      labels[i] = static_cast<unsigned>(v % m);
      v /= m;
      syms[i] = c.point(labels[i]);
    }
    const double metric = ml_metric(frame, h, stbc_encode(syms, scheme) * tx_scale);
    if (metric < best_metric) {
      best_metric = metric;
      best = labels;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("stbc_encode: table structure for G2 and G3") {
  const auto g2 = StbcScheme::make(StbcName::G2);
  const cxd x1(0.3, -0.7), x2(-1.1, 0.2);
  const SpaceTimeBlock c2 = stbc_encode({x1, x2}, g2);
  CHECK(c2(0, 0) == x1);
  CHECK(c2(0, 1) == x2);
  CHECK(c2(1, 0) == -std::conj(x2));
  CHECK(c2(1, 1) == std::conj(x1));

  const SpaceTimeBlock ident = stbc_encode({cxd(1, 0), cxd(0, 0)}, g2);
  CHECK(ident(0, 0) == cxd(1, 0));
  CHECK(ident(0, 1) == cxd(0, 0));
  CHECK(ident(1, 0) == cxd(0, 0));
  CHECK(ident(1, 1) == cxd(1, 0));

  const auto g3 = StbcScheme::make(StbcName::G3);
  const cxd x3(0.5, 0.4), x4(-0.2, -0.9);
  const SpaceTimeBlock c3 = stbc_encode({x1, x2, x3, x4}, g3);
  REQUIRE(c3.rows() == 8);
  REQUIRE(c3.cols() == 3);
  // Slot V carries the conjugates of slot I.
  CHECK(c3(4, 0) == std::conj(x1));
  CHECK(c3(4, 1) == std::conj(x2));
  CHECK(c3(4, 2) == std::conj(x3));
  CHECK(c3(1, 0) == -x2);
  CHECK(c3(2, 1) == x4);
  CHECK(c3(3, 2) == x2);
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 3; ++i) CHECK(c3(4 + t, i) == std::conj(c3(t, i)));

  CHECK_THROWS_AS(stbc_encode({x1}, g2), std::invalid_argument);
}

TEST_CASE("stbc orthogonality identities over random draws") {
  RandomStream rng(21);
  const auto g2 = StbcScheme::make(StbcName::G2);
  const auto g3 = StbcScheme::make(StbcName::G3);
  for (int i = 0; i < 10000; ++i) {
    const cxd x1 = rng.cgaussian(1.0), x2 = rng.cgaussian(1.0);
    const SpaceTimeBlock c2 = stbc_encode({x1, x2}, g2);
    const double e2 = std::norm(x1) + std::norm(x2);
    CHECK(((c2.adjoint() * c2) - e2 * Eigen::MatrixXcd::Identity(2, 2)).norm() <=
          1e-12 * std::max(e2, 1.0));

    const cxd x3 = rng.cgaussian(1.0), x4 = rng.cgaussian(1.0);
    const SpaceTimeBlock c3 = stbc_encode({x1, x2, x3, x4}, g3);
    const double e3 = 2.0 * (std::norm(x1) + std::norm(x2) + std::norm(x3) + std::norm(x4));
    CHECK(((c3.adjoint() * c3) - e3 * Eigen::MatrixXcd::Identity(3, 3)).norm() <=
          1e-12 * std::max(e3, 1.0));
  }
}

TEST_CASE("apply_channel: noise statistics at n_tx = 2, SNR = 1") {
  RandomStream rng(23);
  const auto g2 = StbcScheme::make(StbcName::G2);
  const SpaceTimeBlock zero = stbc_encode({cxd(0, 0), cxd(0, 0)}, g2);
  const ChannelMatrix h = ChannelMatrix::Ones(1, 2);
  double re = 0.0, im = 0.0, tot = 0.0;
  std::size_t count = 0;
  while (count < 1000000) {
    const ReceivedFrame f = apply_channel(zero, h, 1.0, rng);
    for (int t = 0; t < 2; ++t) {
      re += f.r(t, 0).real() * f.r(t, 0).real();
      im += f.r(t, 0).imag() * f.r(t, 0).imag();
      tot += std::norm(f.r(t, 0));
      ++count;
    }
  }
  // Per real dimension n/(2 SNR) = 1; total complex variance n/SNR = 2.
  CHECK(re / count == doctest::Approx(1.0).epsilon(0.01));
  CHECK(im / count == doctest::Approx(1.0).epsilon(0.01));
  CHECK(tot / count == doctest::Approx(2.0).epsilon(0.01));

  CHECK_THROWS_AS(apply_channel(zero, h, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(apply_channel(zero, h, -3.0, rng), std::invalid_argument);
}

TEST_CASE("apply_channel: noiseless single-path passthrough") {
  const auto g2 = StbcScheme::make(StbcName::G2);
  const cxd x1(1.0, 0.5), x2(-0.5, 0.25);
  const SpaceTimeBlock c = stbc_encode({x1, x2}, g2);
  ChannelMatrix h = ChannelMatrix::Zero(1, 2);
  h(0, 0) = cxd(1.0, 0.0);
  const ReceivedFrame f = apply_channel_var(c, h, 0.0, nullptr);
  CHECK(f.r(0, 0) == c(0, 0));
  CHECK(f.r(1, 0) == c(1, 0));
}

TEST_CASE("ml_metric: zero on the transmitted block, nonnegative everywhere") {
  RandomStream rng(29);
  const auto g2 = StbcScheme::make(StbcName::G2);
  const auto c = Constellation::qam(16);
  for (int i = 0; i < 50; ++i) {
    const std::vector<cxd> syms = {c.point(static_cast<unsigned>(rng.bits() % 16)),
                                   c.point(static_cast<unsigned>(rng.bits() % 16))};
    const SpaceTimeBlock tx = stbc_encode(syms, g2);
    const ChannelMatrix h = rayleigh_realization(2, 2, rng);
    const ReceivedFrame f = apply_channel_var(tx, h, 0.0, nullptr);
    CHECK(ml_metric(f, h, tx) == doctest::Approx(0.0).epsilon(1e-15));
    const std::vector<cxd> other = {c.point(3), c.point(11)};
    CHECK(ml_metric(f, h, stbc_encode(other, g2)) >= 0.0);
  }
}

TEST_CASE("stbc_detect: single-antenna passthrough recovers symbols exactly") {
  const auto g2 = StbcScheme::make(StbcName::G2);
  const auto c = Constellation::qam(16);
  const std::vector<cxd> syms = {c.point(5), c.point(12)};
  const SpaceTimeBlock tx = stbc_encode(syms, g2);
  ChannelMatrix h = ChannelMatrix::Zero(1, 2);
  h(0, 0) = cxd(1.0, 0.0);
  const ReceivedFrame f = apply_channel_var(tx, h, 0.0, nullptr);
  const DetectionResult det = stbc_detect(f, h, g2, c);
  CHECK(std::abs(det.soft[0] - syms[0]) < 1e-12);
  CHECK(std::abs(det.soft[1] - syms[1]) < 1e-12);
  CHECK(det.gain == doctest::Approx(1.0));
}

TEST_CASE("stbc_detect: G3 with a random full-rank channel recovers noiselessly") {
  RandomStream rng(31);
  const auto g3 = StbcScheme::make(StbcName::G3);
  const auto c = Constellation::qam(16);
  const std::vector<cxd> syms = {c.point(1), c.point(7), c.point(9), c.point(14)};
  const ChannelMatrix h = rayleigh_realization(2, 3, rng);
  const ReceivedFrame f = apply_channel_var(stbc_encode(syms, g3), h, 0.0, nullptr);
  const DetectionResult det = stbc_detect(f, h, g3, c);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(det.soft[k] - syms[k]) < 1e-10);
  CHECK(det.gain == doctest::Approx(2.0 * h.squaredNorm()).epsilon(1e-9));
}

TEST_CASE("stbc_detect: degenerate all-zero channel rejected") {
  const auto g2 = StbcScheme::make(StbcName::G2);
  const auto c = Constellation::qam(16);
  const ChannelMatrix h = ChannelMatrix::Zero(1, 2);
  const ReceivedFrame f = apply_channel_var(stbc_encode({c.point(0), c.point(1)}, g2), h, 0.0,
                                            nullptr);
  CHECK_THROWS_AS(stbc_detect(f, h, g2, c), DegenerateChannelError);
}

TEST_CASE("stbc_detect: agrees with the exhaustive metric minimizer") {
  RandomStream rng(37);
  const auto c16 = Constellation::qam(16);
  const auto g2 = StbcScheme::make(StbcName::G2);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<cxd> syms = {c16.point(static_cast<unsigned>(rng.bits() % 16)),
                                   c16.point(static_cast<unsigned>(rng.bits() % 16))};
    const ChannelMatrix h = rayleigh_realization(1, 2, rng);
    const ReceivedFrame f = apply_channel(stbc_encode(syms, g2), h, 8.0, rng);
    const DetectionResult det = stbc_detect(f, h, g2, c16);
    const auto oracle = brute_force_detect(f, h, g2, c16, 1.0);
    REQUIRE(det.labels.size() == oracle.size());
    for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(det.labels[k] == oracle[k]);
  }

  const auto c4 = Constellation::qam(4);
  const auto g3 = StbcScheme::make(StbcName::G3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<cxd> syms(4);
    for (auto& s : syms) s = c4.point(static_cast<unsigned>(rng.bits() % 4));
    const ChannelMatrix h = rayleigh_realization(2, 3, rng);
    const ReceivedFrame f = apply_channel(stbc_encode(syms, g3), h, 4.0, rng);
    const DetectionResult det = stbc_detect(f, h, g3, c4);
    const auto oracle = brute_force_detect(f, h, g3, c4, 1.0);
    for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(det.labels[k] == oracle[k]);
  }
}

TEST_CASE("stbc_detect: equivalent-gain law for the post-combining noise") {
  RandomStream rng(41);
  const auto c = Constellation::qam(16);
  const auto g2 = StbcScheme::make(StbcName::G2);
  const ChannelMatrix h = rayleigh_realization(2, 2, rng);
  const double snr = 5.0;
  const double sigma2 = 2.0 / snr;
  double err_power = 0.0;
  const int trials = 20000;
  for (int trial = 0; trial < trials; ++trial) {
    const std::vector<cxd> syms = {c.point(static_cast<unsigned>(rng.bits() % 16)),
                                   c.point(static_cast<unsigned>(rng.bits() % 16))};
    const ReceivedFrame f = apply_channel(stbc_encode(syms, g2), h, snr, rng);
    const DetectionResult det = stbc_detect(f, h, g2, c);
    err_power += std::norm(det.soft[0] - syms[0]) + std::norm(det.soft[1] - syms[1]);
  }
  const double expected = sigma2 / h.squaredNorm();
  CHECK(err_power / (2.0 * trials) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("total-power normalization keeps per-slot power independent of n_tx") {
  RandomStream rng(43);
  const auto c = Constellation::qam(16);
  for (auto name : {StbcName::None, StbcName::G2, StbcName::G3}) {
    const auto scheme = StbcScheme::make(name);
    const double scale = 1.0 / std::sqrt(static_cast<double>(scheme.n_tx));
    double slot_power = 0.0;
    std::size_t slots = 0;
    for (int i = 0; i < 4000; ++i) {
      std::vector<cxd> syms(scheme.symbols);
      for (auto& s : syms) s = c.point(static_cast<unsigned>(rng.bits() % 16));
      const SpaceTimeBlock tx = stbc_encode(syms, scheme) * scale;
      for (int t = 0; t < scheme.slots; ++t) {
        slot_power += tx.row(t).squaredNorm();
        ++slots;
      }
    }
    CHECK(slot_power / slots == doctest::Approx(1.0).epsilon(0.05));
  }
}
