#ifndef LINKSIM_FEC_HPP_
#define LINKSIM_FEC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/modem.hpp"

namespace linksim {

// Recursive systematic convolutional code. Polynomials use bit i for the
// coefficient of D^i; the feedback polynomial must have bit 0 and bit
// `memory` set. With inputs_per_step == 2 the single parity machine is
// driven by the XOR of the two input bits (rate 2/3).
struct RscCode {
  int memory = 2;
  unsigned feedback = 07;
  std::vector<unsigned> feedforward = {05};
  int inputs_per_step = 1;

  int outputs_per_step() const { return inputs_per_step + static_cast<int>(feedforward.size()); }
  int states() const { return 1 << memory; }
  double rate() const { return static_cast<double>(inputs_per_step) / outputs_per_step(); }
  void validate() const;

  static RscCode outer_default();  // rate 1/2, (1, 5/7) octal
  static RscCode inner_default();  // rate 2/3, parity (5/7) on the input sum
};

// Trellis-terminated encoding from the all-zero state back to the all-zero
// state; tail inputs are appended automatically (memory steps).
std::vector<std::uint8_t> rsc_encode(const std::vector<std::uint8_t>& bits, const RscCode& code);

// Quadratic permutation pi(i) = k i (i+1) / 2 mod N, N a power of two and
// k odd. Applying it to a sequence moves element i to position pi(i).
class InterleaverSpec {
 public:
  static InterleaverSpec quadratic(std::size_t length, unsigned multiplier = 1);

  std::size_t length() const { return length_; }
  unsigned multiplier() const { return multiplier_; }
  std::size_t map(std::size_t i) const;
  const std::vector<std::uint32_t>& forward() const { return forward_; }
  const std::vector<std::uint32_t>& inverse() const { return inverse_; }

  template <typename T>
  std::vector<T> permute(const std::vector<T>& in) const {
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[forward_[i]] = in[i];
    return out;
  }
  template <typename T>
  std::vector<T> depermute(const std::vector<T>& in) const {
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[forward_[i]];
    return out;
  }

 private:
  std::size_t length_ = 0;
  unsigned multiplier_ = 1;
  std::vector<std::uint32_t> forward_, inverse_;
};

// Serial concatenation: outer encode, permute the outer codeword, inner
// encode. The terminated outer codeword exactly fills the interleaver.
struct SccCode {
  RscCode outer = RscCode::outer_default();
  RscCode inner = RscCode::inner_default();
  InterleaverSpec interleaver;

  std::size_t message_length() const;
  std::size_t codeword_length() const;
  double rate() const {
    return static_cast<double>(message_length()) / codeword_length();
  }
  void validate() const;
  static SccCode with_defaults(std::size_t interleaver_length = 4096, unsigned multiplier = 1);
};

std::vector<std::uint8_t> scc_encode(const std::vector<std::uint8_t>& message,
                                     const SccCode& code);

enum class DecodeAlgorithm { Map, LogMap, MaxLogMap };
DecodeAlgorithm decode_algorithm_from_string(const std::string& s);
const char* decode_algorithm_label(DecodeAlgorithm a);

// One SISO pass over a terminated RSC trellis. coded_llr carries one LLR
// per codeword bit (systematic bits first within each step), input_prior
// one LLR per trellis input bit, both sized for the tail steps as well.
struct SisoInput {
  std::vector<double> coded_llr;
  std::vector<double> input_prior;
};

struct SisoOutput {
  std::vector<double> input_posterior;
  std::vector<double> input_extrinsic;  // posterior minus prior
  std::vector<double> coded_posterior;
  std::vector<double> coded_extrinsic;  // posterior minus coded input
};

SisoOutput siso_decode(const SisoInput& in, const RscCode& code, DecodeAlgorithm alg);

struct SccDecodeResult {
  std::vector<std::uint8_t> message;
  std::vector<std::vector<std::uint8_t>> per_iteration;  // decision after each round
};

SccDecodeResult scc_decode_detailed(const LlrFrame& channel_llrs, const SccCode& code,
                                    DecodeAlgorithm alg, int iterations,
                                    bool keep_iterations = false);
std::vector<std::uint8_t> scc_decode(const LlrFrame& channel_llrs, const SccCode& code,
                                     DecodeAlgorithm alg, int iterations);

}  // namespace linksim

#endif  // LINKSIM_FEC_HPP_
