#ifndef LINKSIM_SIM_HPP_
#define LINKSIM_SIM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/channel.hpp"
#include "linksim/fec.hpp"
#include "linksim/modem.hpp"
#include "linksim/stbc.hpp"
#include "linksim/tde.hpp"

namespace linksim {

enum class Coding { None, Scc };
enum class ChannelModel { Awgn, RayleighIid, Geometric };
enum class FadingWindow { PerBlock, PerFrame };
enum class PowerNorm { PerAntenna, TotalPower };

// One full transmit/receive chain: encoder, QAM mapper, space-time block
// encoder, channel, combiner/detector, soft demapper, iterative decoder.
struct LinkConfig {
  int constellation_order = 16;
  Coding coding = Coding::None;
  SccCode scc;
  DecodeAlgorithm algorithm = DecodeAlgorithm::LogMap;
  int iterations = 8;
  LlrMethod llr_method = LlrMethod::MaxLog;

  StbcScheme stbc = StbcScheme::make(StbcName::None);
  int n_rx = 1;
  PowerNorm normalization = PowerNorm::PerAntenna;
  FadingWindow fading_window = FadingWindow::PerBlock;

  ChannelModel channel = ChannelModel::Awgn;
  std::vector<PathSpec> paths;   // geometric model only
  ArrayGeometry geometry;

  std::size_t frame_info_bits = 4096;  // uncoded frames; coded frames use the code
  bool noiseless = false;

  void validate() const;
  std::size_t info_bits_per_frame() const;
  double tx_scale() const;
};

struct TrialResult {
  std::size_t info_bits = 0;
  std::size_t bit_errors = 0;
  std::vector<std::uint8_t> tx_bits, rx_bits;  // filled when keep_bits
  std::vector<unsigned> tx_labels, rx_labels;  // uncoded diagnostics
};

TrialResult run_link_trial(const LinkConfig& cfg, double ebn0_db, std::uint64_t seed,
                           bool keep_bits = false);

struct StopRule {
  std::size_t min_errors = 100;
  std::size_t max_bits = 100000000;
  double max_seconds = 0.0;  // <= 0: no wall-clock budget (keeps runs deterministic)
  void validate() const;
};

struct BerPoint {
  double ebn0_db = 0.0;
  std::size_t frames = 0;
  std::size_t bits = 0;
  std::size_t errors = 0;
  double ber = 0.0;        // errors / bits
  double ber_bound = 0.0;  // (errors + 3) / bits when censored, else ber
  double ci95 = 0.0;
  bool censored = false;
};

std::vector<BerPoint> ber_sweep(const LinkConfig& cfg, const std::vector<double>& ebn0_list,
                                const StopRule& stop, std::uint64_t master_seed, int threads);

struct TdeTrialRecord {
  double snr_db = 0.0;
  std::size_t trial = 0;
  double tau_true = 0.0;
  double tau_hat = 0.0;
  double abs_error = 0.0;
  double residual = 0.0;
  bool failed = false;
};

struct TdeSnrStats {
  double snr_db = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<double> rmse;        // per path, over successful trials
  std::vector<double> median_abs;  // per path
};

struct TdeSweepResult {
  std::vector<TdeTrialRecord> records;
  std::vector<TdeSnrStats> stats;
};

TdeSweepResult tde_sweep(const TdeScenario& scenario, const SearchSpec& search,
                         double threshold_fraction, const std::vector<double>& snr_db_list,
                         std::size_t trials, std::uint64_t master_seed, int threads);

struct CaptureRecord {
  cxd rx;
  cxd tx;
  unsigned label = 0;
  double post_noise_variance = 0.0;
};

// Post-combining decision statistics normalized by the equivalent channel
// gain; noiseless captures land on the constellation points.
std::vector<CaptureRecord> constellation_capture(const LinkConfig& cfg, double ebn0_db,
                                                 std::size_t n_symbols, std::uint64_t seed);

}  // namespace linksim

#endif  // LINKSIM_SIM_HPP_
