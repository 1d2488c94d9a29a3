#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "linksim/errors.hpp"
#include "linksim/fec.hpp"
#include "linksim/rng.hpp"

using namespace linksim;

namespace {

// Independent shift-register simulation of the (1, 5/7) code, written out
// bit by bit; the oracle for rsc_encode.
std::vector<std::uint8_t> reference_rsc_157(const std::vector<std::uint8_t>& bits) {
  std::vector<std::uint8_t> out;
  int s1 = 0, s2 = 0;
  const auto step = [&](int u, bool tail) {
    const int d = tail ? 0 : (u ^ s1 ^ s2);
    const int sys = tail ? (s1 ^ s2) : u;
    const int par = d ^ s2;  // feedforward 101: current and oldest taps
    out.push_back(static_cast<std::uint8_t>(sys));
    out.push_back(static_cast<std::uint8_t>(par));
    s2 = s1;
    s1 = d;
  };
  for (std::uint8_t b : bits) step(b, false);
  step(0, true);
  step(0, true);
  return out;
}

std::vector<std::uint8_t> random_bits(std::size_t n, RandomStream& rng) {
  std::vector<std::uint8_t> b(n);
  for (auto& v : b) v = rng.bit() ? 1 : 0;
  return b;
}

// Minimum Hamming weight over all nonzero terminated codewords up to a
// message length; breadth search over short messages is enough for the
// free distance of a memory-2 code.
int free_distance_157(int max_len) {
  int best = 1 << 20;
  for (int len = 1; len <= max_len; ++len) {
    for (std::uint64_t m = 1; m < (1ull << len); ++m) {
      std::vector<std::uint8_t> bits(len);
      for (int i = 0; i < len; ++i) bits[i] = static_cast<std::uint8_t>((m >> i) & 1u);
      if (bits[0] == 0) continue;  // shift-invariant; anchor the first one
      const auto cw = rsc_encode(bits, RscCode::outer_default());
      best = std::min(best, static_cast<int>(std::accumulate(cw.begin(), cw.end(), 0)));
    }
  }
  return best;
}

LlrFrame bpsk_llrs(const std::vector<std::uint8_t>& codeword, double magnitude) {
  LlrFrame f;
  f.noise_variance = 1.0;
  f.llr.resize(codeword.size());
  for (std::size_t i = 0; i < codeword.size(); ++i)
    f.llr[i] = codeword[i] ? -magnitude : magnitude;
  return f;
}

LlrFrame noisy_llrs(const std::vector<std::uint8_t>& codeword, double esn0_db,
                    RandomStream& rng) {
  // BPSK over AWGN: LLR = 2 y / sigma^2 with y = (1 - 2c) + n.
  const double esn0 = std::pow(10.0, esn0_db / 10.0);
  const double sigma2 = 1.0 / esn0;
  LlrFrame f;
  f.noise_variance = sigma2;
  f.llr.resize(codeword.size());
  for (std::size_t i = 0; i < codeword.size(); ++i) {
    const double y = (codeword[i] ? -1.0 : 1.0) + std::sqrt(sigma2 / 2.0) * rng.gaussian();
    f.llr[i] = 2.0 * y / (sigma2 / 2.0);
  }
  return f;
}

}  // namespace

TEST_CASE("rsc_encode: matches the hand-written (1,5/7) simulation") {
  const RscCode code = RscCode::outer_default();

  SUBCASE("all-zero message stays all-zero") {
    const auto cw = rsc_encode(std::vector<std::uint8_t>(64, 0), code);
    CHECK(std::accumulate(cw.begin(), cw.end(), 0) == 0);
    CHECK(cw.size() == (64 + 2) * 2);
  }

  SUBCASE("impulse response") {
    const std::vector<std::uint8_t> impulse = {1, 0, 0, 0};
    CHECK(rsc_encode(impulse, code) == reference_rsc_157(impulse));
  }

  SUBCASE("random messages") {
    RandomStream rng(17);
    for (int i = 0; i < 50; ++i) {
      const auto bits = random_bits(1 + rng.bits() % 96, rng);
      CHECK(rsc_encode(bits, code) == reference_rsc_157(bits));
    }
  }

  SUBCASE("termination returns the trellis to the all-zero state") {
    RandomStream rng(19);
    const auto bits = random_bits(200, rng);
    const auto cw = rsc_encode(bits, code);
    // Replay the systematic stream (message plus tail inputs) and check
    // the final state.
    int s1 = 0, s2 = 0;
    for (std::size_t step = 0; step < cw.size() / 2; ++step) {
      const int u = cw[2 * step];
      const int d = u ^ s1 ^ s2;
      s2 = s1;
      s1 = d;
    }
    CHECK(s1 == 0);
    CHECK(s2 == 0);
  }

  CHECK_THROWS_AS(rsc_encode({1, 0, 1}, RscCode::inner_default()), std::invalid_argument);
}

TEST_CASE("rsc validation rejects malformed polynomials") {
  RscCode bad = RscCode::outer_default();
  bad.feedback = 06;  // even constant term: not recursive
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RscCode::outer_default();
  bad.feedback = 03;  // degree below the memory
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("quadratic interleaver: frozen permutation, bijection, inverse") {
  const auto spec8 = InterleaverSpec::quadratic(8, 1);
  const std::vector<std::uint32_t> expected = {0, 1, 3, 6, 2, 7, 5, 4};
  CHECK(spec8.forward() == expected);

  const auto spec = InterleaverSpec::quadratic(4096, 1);
  std::set<std::uint32_t> image(spec.forward().begin(), spec.forward().end());
  CHECK(image.size() == 4096);
  CHECK(*image.begin() == 0);
  CHECK(*image.rbegin() == 4095);

  RandomStream rng(23);
  for (std::size_t n : {8u, 64u, 1024u}) {
    const auto s = InterleaverSpec::quadratic(n, 3);
    std::vector<double> data(n);
    for (auto& d : data) d = rng.uniform();
    CHECK(s.depermute(s.permute(data)) == data);
  }

  CHECK_THROWS_AS(InterleaverSpec::quadratic(48, 1), ConfigError);
  CHECK_THROWS_AS(InterleaverSpec::quadratic(64, 2), ConfigError);
}

TEST_CASE("scc_encode: lengths, linearity, outer distance") {
  const SccCode code = SccCode::with_defaults(4096, 1);
  CHECK(code.message_length() == 2046);
  CHECK(code.codeword_length() == 6150);
  CHECK(code.rate() == doctest::Approx(1.0 / 3.0).epsilon(0.01));

  SUBCASE("all-zero message gives the all-zero codeword") {
    const auto cw = scc_encode(std::vector<std::uint8_t>(2046, 0), code);
    CHECK(std::accumulate(cw.begin(), cw.end(), 0) == 0);
  }

  SUBCASE("wrong message length rejected") {
    CHECK_THROWS_AS(scc_encode(std::vector<std::uint8_t>(2048, 0), code),
                    std::invalid_argument);
  }

  SUBCASE("linearity over GF(2)") {
    const SccCode small = SccCode::with_defaults(256, 1);
    RandomStream rng(29);
    const auto a = random_bits(small.message_length(), rng);
    const auto b = random_bits(small.message_length(), rng);
    std::vector<std::uint8_t> ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] ^ b[i];
    const auto ca = scc_encode(a, small);
    const auto cb = scc_encode(b, small);
    const auto cab = scc_encode(ab, small);
    for (std::size_t i = 0; i < cab.size(); ++i) CHECK(cab[i] == (ca[i] ^ cb[i]));
  }

  SUBCASE("single-bit message difference spreads to at least d_free positions") {
    const int dfree = free_distance_157(10);
    CHECK(dfree == 5);  // known free distance of the (1,5/7) code
    const SccCode small = SccCode::with_defaults(256, 1);
    RandomStream rng(31);
    const auto a = random_bits(small.message_length(), rng);
    auto b = a;
    b[40] ^= 1;
    const auto oa = rsc_encode(a, small.outer);
    const auto ob = rsc_encode(b, small.outer);
    int diff = 0;
    for (std::size_t i = 0; i < oa.size(); ++i) diff += oa[i] != ob[i];
    CHECK(diff >= dfree);
  }
}

TEST_CASE("siso_decode: noiseless, symmetric, and error cases") {
  const RscCode code = RscCode::outer_default();
  RandomStream rng(37);
  const auto bits = random_bits(64, rng);
  const auto cw = rsc_encode(bits, code);

  SUBCASE("noiseless posteriors reproduce the message") {
    SisoInput in;
    in.coded_llr = bpsk_llrs(cw, 20.0).llr;
    in.input_prior.assign(cw.size() / 2, 0.0);
    for (auto alg : {DecodeAlgorithm::MaxLogMap, DecodeAlgorithm::LogMap, DecodeAlgorithm::Map}) {
      const SisoOutput out = siso_decode(in, code, alg);
      for (std::size_t i = 0; i < bits.size(); ++i)
        CHECK((out.input_posterior[i] < 0) == (bits[i] != 0));
    }
  }

  SUBCASE("all-zero input gives all-zero extrinsics") {
    SisoInput in;
    in.coded_llr.assign(cw.size(), 0.0);
    in.input_prior.assign(cw.size() / 2, 0.0);
    for (auto alg : {DecodeAlgorithm::MaxLogMap, DecodeAlgorithm::LogMap, DecodeAlgorithm::Map}) {
      const SisoOutput out = siso_decode(in, code, alg);
      for (double v : out.input_extrinsic) CHECK(std::abs(v) < 1e-9);
    }
  }

  SUBCASE("non-finite input rejected") {
    SisoInput in;
    in.coded_llr.assign(cw.size(), 0.0);
    in.coded_llr[3] = INFINITY;
    in.input_prior.assign(cw.size() / 2, 0.0);
    CHECK_THROWS_AS(siso_decode(in, code, DecodeAlgorithm::LogMap), std::invalid_argument);
  }
}

TEST_CASE("siso_decode: log-map matches probability-domain map to 1e-6") {
  const RscCode code = RscCode::outer_default();
  RandomStream rng(41);
  const auto bits = random_bits(64, rng);
  const auto cw = rsc_encode(bits, code);
  SisoInput in;
  in.coded_llr = noisy_llrs(cw, 0.0, rng).llr;
  in.input_prior.assign(cw.size() / 2, 0.0);
  const SisoOutput log_out = siso_decode(in, code, DecodeAlgorithm::LogMap);
  const SisoOutput map_out = siso_decode(in, code, DecodeAlgorithm::Map);
  for (std::size_t i = 0; i < log_out.input_posterior.size(); ++i)
    CHECK(log_out.input_posterior[i] ==
          doctest::Approx(map_out.input_posterior[i]).epsilon(1e-6));
}

TEST_CASE("siso_decode: extrinsic output is independent of the same bit's prior") {
  const RscCode code = RscCode::outer_default();
  RandomStream rng(43);
  const auto bits = random_bits(48, rng);
  const auto cw = rsc_encode(bits, code);
  SisoInput in;
  in.coded_llr = noisy_llrs(cw, 2.0, rng).llr;
  in.input_prior.assign(cw.size() / 2, 0.0);
  for (std::size_t i = 0; i < in.input_prior.size(); ++i) in.input_prior[i] = rng.gaussian();

  const SisoOutput base = siso_decode(in, code, DecodeAlgorithm::MaxLogMap);
  for (std::size_t i : {std::size_t(0), std::size_t(10), std::size_t(47)}) {
    SisoInput mod = in;
    mod.input_prior[i] += 3.5;
    const SisoOutput out = siso_decode(mod, code, DecodeAlgorithm::MaxLogMap);
    CHECK(out.input_extrinsic[i] == doctest::Approx(base.input_extrinsic[i]).epsilon(1e-9));
  }
}

TEST_CASE("scc_decode: noiseless roundtrip for every algorithm") {
  const SccCode code = SccCode::with_defaults(512, 1);
  RandomStream rng(47);
  const auto msg = random_bits(code.message_length(), rng);
  const auto cw = scc_encode(msg, code);
  const LlrFrame llrs = bpsk_llrs(cw, 30.0);
  for (auto alg : {DecodeAlgorithm::MaxLogMap, DecodeAlgorithm::LogMap, DecodeAlgorithm::Map}) {
    CHECK(scc_decode(llrs, code, alg, 1) == msg);
    CHECK(scc_decode(llrs, code, alg, 4) == msg);
  }
  CHECK_THROWS_AS(scc_decode(llrs, code, DecodeAlgorithm::LogMap, 0), ConfigError);
}

TEST_CASE("scc_decode: log-map and map agree on noisy frames") {
  const SccCode code = SccCode::with_defaults(256, 1);
  RandomStream rng(53);
  int frames_checked = 0;
  for (int f = 0; f < 200; ++f) {
    const auto msg = random_bits(code.message_length(), rng);
    const LlrFrame llrs = noisy_llrs(scc_encode(msg, code), 0.5, rng);
    const auto a = scc_decode(llrs, code, DecodeAlgorithm::LogMap, 4);
    const auto b = scc_decode(llrs, code, DecodeAlgorithm::Map, 4);
    CHECK(a == b);
    ++frames_checked;
  }
  CHECK(frames_checked == 200);
}

TEST_CASE("scc_decode: max-log never beats log-map on paired noise") {
  const SccCode code = SccCode::with_defaults(512, 1);
  RandomStream rng(101);
  const double esn0 = std::pow(10.0, -2.6 / 10.0);
  std::size_t e_log = 0, e_max = 0;
  for (int f = 0; f < 100; ++f) {
    std::vector<std::uint8_t> msg(code.message_length());
    for (auto& b : msg) b = rng.bit() ? 1 : 0;
    const auto cw = scc_encode(msg, code);
    LlrFrame llrs;
    llrs.noise_variance = 1.0 / esn0;
    llrs.llr.resize(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i) {
      const double y = (cw[i] ? -1.0 : 1.0) + std::sqrt(1.0 / (2.0 * esn0)) * rng.gaussian();
      llrs.llr[i] = 4.0 * y * esn0;
    }
    const auto a = scc_decode(llrs, code, DecodeAlgorithm::LogMap, 4);
    const auto b = scc_decode(llrs, code, DecodeAlgorithm::MaxLogMap, 4);
    for (std::size_t i = 0; i < msg.size(); ++i) {
      e_log += a[i] != msg[i];
      e_max += b[i] != msg[i];
    }
  }
  CHECK(e_max >= e_log);
  CHECK(e_max > 0);  // the operating point actually separates them
}

TEST_CASE("scc_decode: iteration gain and waterfall behavior") {
  const SccCode code = SccCode::with_defaults(512, 1);
  RandomStream rng(59);
  const int frames = 120;
  const double esn0_db = -2.3;  // mid-waterfall for this short frame
  std::vector<std::size_t> errors(8, 0);
  std::size_t bits = 0;
  for (int f = 0; f < frames; ++f) {
    const auto msg = random_bits(code.message_length(), rng);
    const LlrFrame llrs = noisy_llrs(scc_encode(msg, code), esn0_db, rng);
    const SccDecodeResult res =
        scc_decode_detailed(llrs, code, DecodeAlgorithm::LogMap, 8, true);
    for (int it = 0; it < 8; ++it)
      for (std::size_t i = 0; i < msg.size(); ++i)
        errors[it] += res.per_iteration[it][i] != msg[i];
    bits += msg.size();
  }
  // Later iterations never hurt on average, and eight rounds beat one.
  CHECK(errors[7] < errors[0]);
  for (int it = 1; it < 8; ++it) CHECK(errors[it] <= errors[it - 1] + errors[0] / 20);
}
