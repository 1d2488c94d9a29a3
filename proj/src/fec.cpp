#include "linksim/fec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "linksim/errors.hpp"

namespace linksim {
namespace {

constexpr double kLlrClamp = 50.0;
constexpr double kNegInf = -1.0e30;

inline int parity(unsigned v) { return std::popcount(v) & 1; }

inline double clamp_llr(double v) { return std::clamp(v, -kLlrClamp, kLlrClamp); }

// One encoder step: returns packed output bits (systematic bits in input
// order, then parities) and advances the state.
inline unsigned rsc_step(const RscCode& c, unsigned& state, unsigned in_sym) {
  const unsigned driver = static_cast<unsigned>(parity(in_sym));
  const unsigned d = driver ^ static_cast<unsigned>(parity((c.feedback >> 1) & state));
  unsigned out = in_sym;  // systematic bits occupy the low positions
  int pos = c.inputs_per_step;
  for (unsigned ff : c.feedforward) {
    const unsigned p = ((ff & 1u) & d) ^ static_cast<unsigned>(parity((ff >> 1) & state));
    out |= p << pos++;
  }
  state = ((state << 1) | d) & static_cast<unsigned>(c.states() - 1);
  return out;
}

// Tail input that drives the feedback sum to zero in the current state.
inline unsigned rsc_tail_input(const RscCode& c, unsigned state) {
  return static_cast<unsigned>(parity((c.feedback >> 1) & state));
}

struct Trellis {
  int n_states, n_in_syms, k, n;
  // next[s * n_in_syms + u], out[s * n_in_syms + u]
  std::vector<unsigned> next, out;
};

Trellis build_trellis(const RscCode& c) {
  Trellis t;
  t.n_states = c.states();
  t.k = c.inputs_per_step;
  t.n = c.outputs_per_step();
  t.n_in_syms = 1 << t.k;
  t.next.resize(static_cast<std::size_t>(t.n_states) * t.n_in_syms);
  t.out.resize(t.next.size());
  for (int s = 0; s < t.n_states; ++s)
    for (int u = 0; u < t.n_in_syms; ++u) {
      unsigned state = static_cast<unsigned>(s);
      t.out[s * t.n_in_syms + u] = rsc_step(c, state, static_cast<unsigned>(u));
      t.next[s * t.n_in_syms + u] = state;
    }
  return t;
}

inline double max_star_exact(double a, double b) {
  const double m = std::max(a, b);
  const double d = std::abs(a - b);
  if (d > 25.0) return m;  // correction below 1.4e-11
  return m + std::log1p(std::exp(-d));
}

inline double max_star_approx(double a, double b) { return std::max(a, b); }

// Log-domain forward-backward over a terminated trellis.
template <typename MaxStar>
SisoOutput bcjr_log(const Trellis& t, const std::vector<double>& lc,
                    const std::vector<double>& la, int steps, MaxStar mstar) {
  const int ns = t.n_states, nu = t.n_in_syms;
  std::vector<double> alpha(static_cast<std::size_t>(steps + 1) * ns, kNegInf);
  std::vector<double> beta(static_cast<std::size_t>(steps + 1) * ns, kNegInf);
  std::vector<double> gamma(static_cast<std::size_t>(steps) * ns * nu);

  for (int step = 0; step < steps; ++step) {
    const double* lct = lc.data() + static_cast<std::size_t>(step) * t.n;
    const double* lat = la.data() + static_cast<std::size_t>(step) * t.k;
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u) {
        const unsigned bits = t.out[s * nu + u];
        double g = 0.0;
        for (int j = 0; j < t.n; ++j)
          g += ((bits >> j) & 1u) ? -0.5 * lct[j] : 0.5 * lct[j];
        for (int j = 0; j < t.k; ++j)
          g += ((static_cast<unsigned>(u) >> j) & 1u) ? -0.5 * lat[j] : 0.5 * lat[j];
        gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u] = g;
      }
  }

  alpha[0] = 0.0;
  for (int step = 0; step < steps; ++step) {
    double* an = alpha.data() + static_cast<std::size_t>(step + 1) * ns;
    const double* ac = alpha.data() + static_cast<std::size_t>(step) * ns;
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u) {
        const unsigned n2 = t.next[s * nu + u];
        an[n2] = mstar(an[n2],
                       ac[s] + gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u]);
      }
    double m = *std::max_element(an, an + ns);
    for (int s = 0; s < ns; ++s)
      if (an[s] != kNegInf) an[s] -= m;
  }

  beta[static_cast<std::size_t>(steps) * ns] = 0.0;  // terminated at state 0
  for (int step = steps - 1; step >= 0; --step) {
    double* bc = beta.data() + static_cast<std::size_t>(step) * ns;
    const double* bn = beta.data() + static_cast<std::size_t>(step + 1) * ns;
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u) {
        const unsigned n2 = t.next[s * nu + u];
        if (bn[n2] == kNegInf) continue;
        bc[s] = mstar(bc[s],
                      bn[n2] + gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u]);
      }
    double m = *std::max_element(bc, bc + ns);
    if (m != kNegInf)
      for (int s = 0; s < ns; ++s)
        if (bc[s] != kNegInf) bc[s] -= m;
  }

  SisoOutput out;
  out.input_posterior.resize(static_cast<std::size_t>(steps) * t.k);
  out.input_extrinsic.resize(out.input_posterior.size());
  out.coded_posterior.resize(static_cast<std::size_t>(steps) * t.n);
  out.coded_extrinsic.resize(out.coded_posterior.size());

  std::vector<double> in0(t.k), in1(t.k), cd0(t.n), cd1(t.n);
  for (int step = 0; step < steps; ++step) {
    std::fill(in0.begin(), in0.end(), kNegInf);
    std::fill(in1.begin(), in1.end(), kNegInf);
    std::fill(cd0.begin(), cd0.end(), kNegInf);
    std::fill(cd1.begin(), cd1.end(), kNegInf);
    const double* ac = alpha.data() + static_cast<std::size_t>(step) * ns;
    const double* bn = beta.data() + static_cast<std::size_t>(step + 1) * ns;
    for (int s = 0; s < ns; ++s) {
      if (ac[s] == kNegInf) continue;
      for (int u = 0; u < nu; ++u) {
        const unsigned n2 = t.next[s * nu + u];
        if (bn[n2] == kNegInf) continue;
        const double m =
            ac[s] + gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u] + bn[n2];
        const unsigned bits = t.out[s * nu + u];
        for (int j = 0; j < t.k; ++j)
          if ((static_cast<unsigned>(u) >> j) & 1u)
            in1[j] = mstar(in1[j], m);
          else
            in0[j] = mstar(in0[j], m);
        for (int j = 0; j < t.n; ++j)
          if ((bits >> j) & 1u)
            cd1[j] = mstar(cd1[j], m);
          else
            cd0[j] = mstar(cd0[j], m);
      }
    }
    for (int j = 0; j < t.k; ++j) {
      const std::size_t idx = static_cast<std::size_t>(step) * t.k + j;
      out.input_posterior[idx] = in0[j] - in1[j];
      out.input_extrinsic[idx] =
          out.input_posterior[idx] - la[static_cast<std::size_t>(step) * t.k + j];
    }
    for (int j = 0; j < t.n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(step) * t.n + j;
      out.coded_posterior[idx] = cd0[j] - cd1[j];
      out.coded_extrinsic[idx] =
          out.coded_posterior[idx] - lc[static_cast<std::size_t>(step) * t.n + j];
    }
  }
  return out;
}

// Probability-domain MAP with per-step normalization. Identical structure;
// kept separate so the log-domain variants can be checked against it.
SisoOutput bcjr_prob(const Trellis& t, const std::vector<double>& lc,
                     const std::vector<double>& la, int steps) {
  const int ns = t.n_states, nu = t.n_in_syms;
  std::vector<double> alpha(static_cast<std::size_t>(steps + 1) * ns, 0.0);
  std::vector<double> beta(static_cast<std::size_t>(steps + 1) * ns, 0.0);
  std::vector<double> gamma(static_cast<std::size_t>(steps) * ns * nu);

  for (int step = 0; step < steps; ++step) {
    const double* lct = lc.data() + static_cast<std::size_t>(step) * t.n;
    const double* lat = la.data() + static_cast<std::size_t>(step) * t.k;
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u) {
        const unsigned bits = t.out[s * nu + u];
        double g = 0.0;
        for (int j = 0; j < t.n; ++j)
          g += ((bits >> j) & 1u) ? -0.5 * lct[j] : 0.5 * lct[j];
        for (int j = 0; j < t.k; ++j)
          g += ((static_cast<unsigned>(u) >> j) & 1u) ? -0.5 * lat[j] : 0.5 * lat[j];
        gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u] = std::exp(g);
      }
  }

  alpha[0] = 1.0;
  for (int step = 0; step < steps; ++step) {
    double* an = alpha.data() + static_cast<std::size_t>(step + 1) * ns;
    const double* ac = alpha.data() + static_cast<std::size_t>(step) * ns;
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u)
        an[t.next[s * nu + u]] +=
            ac[s] * gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u];
    double sum = 0.0;
    for (int s = 0; s < ns; ++s) sum += an[s];
    for (int s = 0; s < ns; ++s) an[s] /= sum;
  }

  beta[static_cast<std::size_t>(steps) * ns] = 1.0;
  for (int step = steps - 1; step >= 0; --step) {
    double* bc = beta.data() + static_cast<std::size_t>(step) * ns;
    const double* bn = beta.data() + static_cast<std::size_t>(step + 1) * ns;
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u)
        bc[s] += bn[t.next[s * nu + u]] *
                 gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u];
    double sum = 0.0;
    for (int s = 0; s < ns; ++s) sum += bc[s];
    if (sum > 0.0)
      for (int s = 0; s < ns; ++s) bc[s] /= sum;
  }

  SisoOutput out;
  out.input_posterior.resize(static_cast<std::size_t>(steps) * t.k);
  out.input_extrinsic.resize(out.input_posterior.size());
  out.coded_posterior.resize(static_cast<std::size_t>(steps) * t.n);
  out.coded_extrinsic.resize(out.coded_posterior.size());

  constexpr double kFloor = 1.0e-290;
  std::vector<double> in0(t.k), in1(t.k), cd0(t.n), cd1(t.n);
  for (int step = 0; step < steps; ++step) {
    std::fill(in0.begin(), in0.end(), 0.0);
    std::fill(in1.begin(), in1.end(), 0.0);
    std::fill(cd0.begin(), cd0.end(), 0.0);
    std::fill(cd1.begin(), cd1.end(), 0.0);
    const double* ac = alpha.data() + static_cast<std::size_t>(step) * ns;
    const double* bn = beta.data() + static_cast<std::size_t>(step + 1) * ns;
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u) {
        const double m = ac[s] *
                         gamma[(static_cast<std::size_t>(step) * ns + s) * nu + u] *
                         bn[t.next[s * nu + u]];
        const unsigned bits = t.out[s * nu + u];
        for (int j = 0; j < t.k; ++j)
          (((static_cast<unsigned>(u) >> j) & 1u) ? in1[j] : in0[j]) += m;
        for (int j = 0; j < t.n; ++j)
          (((bits >> j) & 1u) ? cd1[j] : cd0[j]) += m;
      }
    for (int j = 0; j < t.k; ++j) {
      const std::size_t idx = static_cast<std::size_t>(step) * t.k + j;
      out.input_posterior[idx] = std::log(std::max(in0[j], kFloor)) -
                                 std::log(std::max(in1[j], kFloor));
      out.input_extrinsic[idx] =
          out.input_posterior[idx] - la[static_cast<std::size_t>(step) * t.k + j];
    }
    for (int j = 0; j < t.n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(step) * t.n + j;
      out.coded_posterior[idx] = std::log(std::max(cd0[j], kFloor)) -
                                 std::log(std::max(cd1[j], kFloor));
      out.coded_extrinsic[idx] =
          out.coded_posterior[idx] - lc[static_cast<std::size_t>(step) * t.n + j];
    }
  }
  return out;
}

}  // namespace

void RscCode::validate() const {
  if (memory < 1) throw ConfigError("rsc: memory must be >= 1");
  if (memory > 16) throw ConfigError("rsc: memory above 16 is not supported");
  if ((feedback & 1u) == 0)
    throw ConfigError("rsc: feedback polynomial must have a nonzero constant term");
  if ((feedback >> memory) != 1u)
    throw ConfigError("rsc: feedback polynomial must have degree equal to the memory");
  if (feedforward.empty()) throw ConfigError("rsc: at least one feedforward polynomial");
  for (unsigned ff : feedforward) {
    if (ff == 0) throw ConfigError("rsc: feedforward polynomial must be nonzero");
    if ((ff >> (memory + 1)) != 0)
      throw ConfigError("rsc: feedforward polynomial degree exceeds the memory");
  }
  if (inputs_per_step != 1 && inputs_per_step != 2)
    throw ConfigError("rsc: inputs_per_step must be 1 or 2");
}

RscCode RscCode::outer_default() { return RscCode{2, 07, {05}, 1}; }

RscCode RscCode::inner_default() { return RscCode{2, 07, {05}, 2}; }

std::vector<std::uint8_t> rsc_encode(const std::vector<std::uint8_t>& bits,
                                     const RscCode& code) {
  code.validate();
  const int k = code.inputs_per_step;
  if (bits.size() % static_cast<std::size_t>(k) != 0)
    throw std::invalid_argument("rsc_encode: input length not divisible by " +
                                std::to_string(k));
  const std::size_t steps = bits.size() / k;
  const int n = code.outputs_per_step();
  std::vector<std::uint8_t> out((steps + code.memory) * n);
  unsigned state = 0;
  std::size_t w = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    unsigned u = 0;
    for (int j = 0; j < k; ++j) u |= static_cast<unsigned>(bits[s * k + j] & 1u) << j;
    const unsigned o = rsc_step(code, state, u);
    for (int j = 0; j < n; ++j) out[w++] = static_cast<std::uint8_t>((o >> j) & 1u);
  }
  for (int tstep = 0; tstep < code.memory; ++tstep) {
    const unsigned u = rsc_tail_input(code, state);  // higher input bits zero
    const unsigned o = rsc_step(code, state, u);
    for (int j = 0; j < n; ++j) out[w++] = static_cast<std::uint8_t>((o >> j) & 1u);
  }
  return out;
}

InterleaverSpec InterleaverSpec::quadratic(std::size_t length, unsigned multiplier) {
  if (length == 0 || (length & (length - 1)) != 0)
    throw ConfigError("interleaver length must be a power of 2, got " +
                      std::to_string(length));
  if (multiplier % 2 == 0)
    throw ConfigError("interleaver multiplier must be odd, got " +
                      std::to_string(multiplier));
  InterleaverSpec spec;
  spec.length_ = length;
  spec.multiplier_ = multiplier;
  spec.forward_.resize(length);
  spec.inverse_.resize(length);
  for (std::size_t i = 0; i < length; ++i)
    spec.forward_[i] = static_cast<std::uint32_t>(spec.map(i));
  for (std::size_t i = 0; i < length; ++i) spec.inverse_[spec.forward_[i]] = i;
  return spec;
}

std::size_t InterleaverSpec::map(std::size_t i) const {
  // i(i+1)/2 is an integer; reduce mod N on 64-bit intermediates.
  const std::uint64_t tri = (static_cast<std::uint64_t>(i) * (i + 1)) / 2;
  return static_cast<std::size_t>((multiplier_ * tri) % length_);
}

void SccCode::validate() const {
  outer.validate();
  inner.validate();
  const std::size_t n = interleaver.length();
  if (n == 0) throw ConfigError("scc: interleaver not configured");
  if (outer.inputs_per_step != 1)
    throw ConfigError("scc: outer code must take one input per step");
  if (n % static_cast<std::size_t>(outer.outputs_per_step()) != 0)
    throw ConfigError("scc: interleaver length not divisible by the outer output count");
  if (message_length() == 0 || n / outer.outputs_per_step() <= static_cast<std::size_t>(outer.memory))
    throw ConfigError("scc: interleaver too short for the outer code termination");
  if (n % static_cast<std::size_t>(inner.inputs_per_step) != 0)
    throw ConfigError("scc: interleaver length not divisible by the inner input count");
}

std::size_t SccCode::message_length() const {
  // Terminated outer codeword fills the interleaver exactly.
  return interleaver.length() / outer.outputs_per_step() - outer.memory;
}

std::size_t SccCode::codeword_length() const {
  const std::size_t inner_steps = interleaver.length() / inner.inputs_per_step + inner.memory;
  return inner_steps * inner.outputs_per_step();
}

SccCode SccCode::with_defaults(std::size_t interleaver_length, unsigned multiplier) {
  SccCode c;
  c.interleaver = InterleaverSpec::quadratic(interleaver_length, multiplier);
  c.validate();
  return c;
}

std::vector<std::uint8_t> scc_encode(const std::vector<std::uint8_t>& message,
                                     const SccCode& code) {
  code.validate();
  if (message.size() != code.message_length())
    throw std::invalid_argument("scc_encode: message length must be " +
                                std::to_string(code.message_length()) + ", got " +
                                std::to_string(message.size()));
  const std::vector<std::uint8_t> outer_cw = rsc_encode(message, code.outer);
  const std::vector<std::uint8_t> permuted = code.interleaver.permute(outer_cw);
  return rsc_encode(permuted, code.inner);
}

DecodeAlgorithm decode_algorithm_from_string(const std::string& s) {
  if (s == "map") return DecodeAlgorithm::Map;
  if (s == "log-map") return DecodeAlgorithm::LogMap;
  if (s == "max-log-map") return DecodeAlgorithm::MaxLogMap;
  throw ConfigError("decoder algorithm must be map|log-map|max-log-map, got '" + s + "'");
}

const char* decode_algorithm_label(DecodeAlgorithm a) {
  switch (a) {
    case DecodeAlgorithm::Map: return "map";
    case DecodeAlgorithm::LogMap: return "log-map";
    case DecodeAlgorithm::MaxLogMap: return "max-log-map";
  }
  return "?";
}

SisoOutput siso_decode(const SisoInput& in, const RscCode& code, DecodeAlgorithm alg) {
  code.validate();
  const Trellis t = build_trellis(code);
  if (in.coded_llr.size() % static_cast<std::size_t>(t.n) != 0)
    throw std::invalid_argument("siso_decode: coded LLR length not divisible by " +
                                std::to_string(t.n));
  const int steps = static_cast<int>(in.coded_llr.size() / t.n);
  if (in.input_prior.size() != static_cast<std::size_t>(steps) * t.k)
    throw std::invalid_argument("siso_decode: prior length inconsistent with the trellis");
  for (double v : in.coded_llr)
    if (!std::isfinite(v)) throw std::invalid_argument("siso_decode: non-finite coded LLR");
  for (double v : in.input_prior)
    if (!std::isfinite(v)) throw std::invalid_argument("siso_decode: non-finite prior LLR");

  std::vector<double> lc(in.coded_llr.size()), la(in.input_prior.size());
  std::transform(in.coded_llr.begin(), in.coded_llr.end(), lc.begin(), clamp_llr);
  std::transform(in.input_prior.begin(), in.input_prior.end(), la.begin(), clamp_llr);

  switch (alg) {
    case DecodeAlgorithm::MaxLogMap:
      return bcjr_log(t, lc, la, steps, [](double a, double b) { return max_star_approx(a, b); });
    case DecodeAlgorithm::LogMap:
      return bcjr_log(t, lc, la, steps, [](double a, double b) { return max_star_exact(a, b); });
    case DecodeAlgorithm::Map:
      return bcjr_prob(t, lc, la, steps);
  }
  throw std::logic_error("unknown decode algorithm");
}

SccDecodeResult scc_decode_detailed(const LlrFrame& channel_llrs, const SccCode& code,
                                    DecodeAlgorithm alg, int iterations,
                                    bool keep_iterations) {
  code.validate();
  if (iterations < 1) throw ConfigError("scc decode: iterations must be >= 1");
  if (channel_llrs.llr.size() != code.codeword_length())
    throw std::invalid_argument("scc decode: expected " +
                                std::to_string(code.codeword_length()) + " channel LLRs, got " +
                                std::to_string(channel_llrs.llr.size()));

  const std::size_t n = code.interleaver.length();
  const std::size_t inner_steps = n / code.inner.inputs_per_step + code.inner.memory;
  const std::size_t inner_inputs = inner_steps * code.inner.inputs_per_step;
  const std::size_t outer_steps = code.message_length() + code.outer.memory;

  SisoInput inner_in;
  inner_in.coded_llr = channel_llrs.llr;
  inner_in.input_prior.assign(inner_inputs, 0.0);

  SccDecodeResult result;
  SisoOutput outer_out;
  for (int it = 0; it < iterations; ++it) {
    const SisoOutput inner_out = siso_decode(inner_in, code.inner, alg);

    // Extrinsic on the inner systematic inputs, tail steps excluded,
    // becomes the outer decoder's codeword-side input.
    std::vector<double> ext(inner_out.input_extrinsic.begin(),
                            inner_out.input_extrinsic.begin() + n);
    SisoInput outer_in;
    outer_in.coded_llr = code.interleaver.depermute(ext);
    outer_in.input_prior.assign(outer_steps, 0.0);
    outer_out = siso_decode(outer_in, code.outer, alg);

    const std::vector<double> fed_back = code.interleaver.permute(outer_out.coded_extrinsic);
    std::copy(fed_back.begin(), fed_back.end(), inner_in.input_prior.begin());

    if (keep_iterations || it + 1 == iterations) {
      std::vector<std::uint8_t> decision(code.message_length());
      for (std::size_t i = 0; i < decision.size(); ++i)
        decision[i] = outer_out.input_posterior[i] < 0.0 ? 1 : 0;
      if (keep_iterations) result.per_iteration.push_back(decision);
      if (it + 1 == iterations) result.message = std::move(decision);
    }
  }
  return result;
}

std::vector<std::uint8_t> scc_decode(const LlrFrame& channel_llrs, const SccCode& code,
                                     DecodeAlgorithm alg, int iterations) {
  return scc_decode_detailed(channel_llrs, code, alg, iterations).message;
}

}  // namespace linksim
