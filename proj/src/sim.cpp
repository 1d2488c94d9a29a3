#include "linksim/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "linksim/errors.hpp"

namespace linksim {
namespace {

constexpr std::size_t kFramesPerBatch = 64;  // fixed so thread count cannot alter results
constexpr double kHardLlr = 50.0;

// Deterministic parallel map over [0, count): worker w handles indices
// congruent to w mod threads; results land in index order.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const int t = std::max(1, threads);
  if (t == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&, w]() {
      for (std::size_t i = static_cast<std::size_t>(w); i < count; i += static_cast<std::size_t>(t))
        fn(i);
    });
  for (auto& th : pool) th.join();
}

struct FramePlan {
  std::size_t info_bits;
  std::size_t coded_bits;    // bits entering the modulator before padding
  std::size_t pad_bits;
  std::size_t symbols;
  std::size_t blocks;
  std::size_t slots;
};

FramePlan plan_frame(const LinkConfig& cfg) {
  FramePlan p{};
  p.info_bits = cfg.info_bits_per_frame();
  p.coded_bits = (cfg.coding == Coding::Scc) ? cfg.scc.codeword_length() : p.info_bits;
  const Constellation c = Constellation::qam(cfg.constellation_order);
  const std::size_t bps = static_cast<std::size_t>(c.bits_per_symbol());
  const std::size_t per_block = static_cast<std::size_t>(cfg.stbc.symbols);
  const std::size_t raw_symbols = (p.coded_bits + bps - 1) / bps;
  p.blocks = (raw_symbols + per_block - 1) / per_block;
  p.symbols = p.blocks * per_block;
  p.pad_bits = p.symbols * bps - p.coded_bits;
  p.slots = p.blocks * static_cast<std::size_t>(cfg.stbc.slots);
  return p;
}

ChannelMatrix draw_channel(const LinkConfig& cfg, RandomStream& rng) {
  switch (cfg.channel) {
    case ChannelModel::Awgn:
      return ChannelMatrix::Ones(cfg.n_rx, cfg.stbc.n_tx);
    case ChannelModel::RayleighIid:
      return rayleigh_realization(cfg.n_rx, cfg.stbc.n_tx, rng);
    case ChannelModel::Geometric:
      return geometric_channel(cfg.paths, cfg.geometry);
  }
  throw std::logic_error("unknown channel model");
}

// Receive-side noise variance for a target Eb/N0. Per-slot receive power
// is n_tx * tx_scale^2 (unit-variance fading), and every transmitted slot
// is charged to the frame's information bits, termination and padding
// included.
double noise_variance_for(const LinkConfig& cfg, const FramePlan& plan, double ebn0_db) {
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  const double scale = cfg.tx_scale();
  const double slot_power = cfg.stbc.n_tx * scale * scale;
  return slot_power * static_cast<double>(plan.slots) /
         (static_cast<double>(plan.info_bits) * ebn0);
}

}  // namespace

void LinkConfig::validate() const {
  Constellation::qam(constellation_order);  // validates the order
  if (n_rx < 1) throw ConfigError("link: n_rx must be >= 1");
  if (coding == Coding::Scc) {
    scc.validate();
    if (iterations < 1) throw ConfigError("link: decoder iterations must be >= 1");
  } else if (frame_info_bits == 0) {
    throw ConfigError("link: frame_info_bits must be > 0");
  }
  if (channel == ChannelModel::Geometric) {
    if (paths.empty()) throw ConfigError("link: geometric channel needs at least one path");
    geometry.validate();
    if (geometry.n_t != stbc.n_tx || geometry.n_r != n_rx)
      throw ConfigError("link: geometry antenna counts must match the stbc scheme and n_rx");
  }
}

std::size_t LinkConfig::info_bits_per_frame() const {
  return coding == Coding::Scc ? scc.message_length() : frame_info_bits;
}

double LinkConfig::tx_scale() const {
  return normalization == PowerNorm::TotalPower ? 1.0 / std::sqrt(double(stbc.n_tx)) : 1.0;
}

TrialResult run_link_trial(const LinkConfig& cfg, double ebn0_db, std::uint64_t seed,
                           bool keep_bits) {
  cfg.validate();
  const Constellation c = Constellation::qam(cfg.constellation_order);
  const FramePlan plan = plan_frame(cfg);
  const double sigma2 = cfg.noiseless ? 0.0 : noise_variance_for(cfg, plan, ebn0_db);
  const double scale = cfg.tx_scale();
  RandomStream rng(seed);

  std::vector<std::uint8_t> info(plan.info_bits);
  for (auto& b : info) b = rng.bit() ? 1 : 0;

  std::vector<std::uint8_t> coded =
      (cfg.coding == Coding::Scc) ? scc_encode(info, cfg.scc) : info;
  coded.resize(plan.coded_bits + plan.pad_bits, 0);

  const std::vector<cxd> symbols = qam_modulate(coded, c);

  const std::size_t per_block = static_cast<std::size_t>(cfg.stbc.symbols);
  std::vector<cxd> block_syms(per_block);
  std::vector<double> llr;
  std::vector<unsigned> rx_labels;
  const bool coded_mode = cfg.coding == Coding::Scc;
  if (coded_mode) llr.reserve(plan.symbols * c.bits_per_symbol());
  rx_labels.reserve(plan.symbols);

  ChannelMatrix h;
  if (cfg.fading_window == FadingWindow::PerFrame || cfg.channel != ChannelModel::RayleighIid)
    h = draw_channel(cfg, rng);

  for (std::size_t blk = 0; blk < plan.blocks; ++blk) {
    for (std::size_t k = 0; k < per_block; ++k) block_syms[k] = symbols[blk * per_block + k];
    if (cfg.fading_window == FadingWindow::PerBlock && cfg.channel == ChannelModel::RayleighIid)
      h = rayleigh_realization(cfg.n_rx, cfg.stbc.n_tx, rng);

    const SpaceTimeBlock tx = stbc_encode(block_syms, cfg.stbc) * scale;
    const ReceivedFrame frame = apply_channel_var(tx, h, sigma2, &rng);
    const DetectionResult det = stbc_detect(frame, h, cfg.stbc, c, scale);

    for (unsigned l : det.labels) rx_labels.push_back(l);
    if (coded_mode) {
      if (cfg.noiseless) {
        for (std::size_t k = 0; k < per_block; ++k) {
          const unsigned l = det.labels[k];
          for (int j = 0; j < c.bits_per_symbol(); ++j)
            llr.push_back(label_bit(l, j, c.bits_per_symbol()) ? -kHardLlr : kHardLlr);
        }
      } else {
        const double post_var = sigma2 / (det.gain * scale * scale);
        const LlrFrame f = qam_demod_llr(det.soft, post_var, c, cfg.llr_method);
        llr.insert(llr.end(), f.llr.begin(), f.llr.end());
      }
    }
  }

  TrialResult res;
  res.info_bits = plan.info_bits;
  std::vector<std::uint8_t> decoded;
  if (coded_mode) {
    llr.resize(plan.coded_bits);  // padding carries no codeword information
    LlrFrame f;
    f.llr = std::move(llr);
    f.noise_variance = sigma2;
    decoded = scc_decode(f, cfg.scc, cfg.algorithm, cfg.iterations);
  } else {
    decoded.resize(plan.info_bits);
    const int bps = c.bits_per_symbol();
    for (std::size_t i = 0; i < plan.info_bits; ++i)
      decoded[i] = label_bit(rx_labels[i / bps], static_cast<int>(i % bps), bps);
  }

  for (std::size_t i = 0; i < plan.info_bits; ++i)
    if (decoded[i] != info[i]) ++res.bit_errors;

  if (keep_bits) {
    res.tx_bits = std::move(info);
    res.rx_bits = std::move(decoded);
    if (!coded_mode) {
      res.rx_labels = std::move(rx_labels);
      res.tx_labels.resize(plan.symbols);
      for (std::size_t s = 0; s < plan.symbols; ++s) {
        const std::uint8_t* p = coded.data() + s * c.bits_per_symbol();
        res.tx_labels[s] = bits_to_label(p, c.bits_per_symbol());
      }
    }
  }
  return res;
}

void StopRule::validate() const {
  if (min_errors < 1) throw ConfigError("stop rule: min_errors must be >= 1");
  if (max_bits < 1) throw ConfigError("stop rule: max_bits must be >= 1");
}

std::vector<BerPoint> ber_sweep(const LinkConfig& cfg, const std::vector<double>& ebn0_list,
                                const StopRule& stop, std::uint64_t master_seed, int threads) {
  cfg.validate();
  stop.validate();
  if (ebn0_list.empty()) throw ConfigError("ber sweep: empty Eb/N0 list");

  std::vector<BerPoint> points;
  points.reserve(ebn0_list.size());
  for (std::size_t pi = 0; pi < ebn0_list.size(); ++pi) {
    const double ebn0 = ebn0_list[pi];
    const auto start = std::chrono::steady_clock::now();
    BerPoint pt;
    pt.ebn0_db = ebn0;
    std::size_t frame_base = 0;
    bool out_of_time = false;
    while (true) {
      std::vector<TrialResult> batch(kFramesPerBatch);
      parallel_for(kFramesPerBatch, threads, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(master_seed, pi, frame_base + i);
        batch[i] = run_link_trial(cfg, ebn0, seed);
      });
      for (const TrialResult& r : batch) {
        pt.bits += r.info_bits;
        pt.errors += r.bit_errors;
      }
      frame_base += kFramesPerBatch;
      pt.frames = frame_base;
      if (pt.errors >= stop.min_errors) break;
      if (pt.bits >= stop.max_bits) break;
      if (stop.max_seconds > 0.0) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        if (elapsed.count() > stop.max_seconds) {
          out_of_time = true;
          break;
        }
      }
    }
    pt.censored = (pt.errors < stop.min_errors) || out_of_time;
    pt.ber = static_cast<double>(pt.errors) / static_cast<double>(pt.bits);
    // Censored points report a conservative 95% upper bound (rule of three).
    pt.ber_bound = pt.censored
                       ? static_cast<double>(pt.errors + 3) / static_cast<double>(pt.bits)
                       : pt.ber;
    pt.ci95 = 1.96 * std::sqrt(std::max(pt.ber * (1.0 - pt.ber), 0.0) /
                               static_cast<double>(pt.bits));
    points.push_back(pt);
  }
  return points;
}

TdeSweepResult tde_sweep(const TdeScenario& scenario, const SearchSpec& search,
                         double threshold_fraction, const std::vector<double>& snr_db_list,
                         std::size_t trials, std::uint64_t master_seed, int threads) {
  if (trials < 1) throw ConfigError("tde sweep: trials must be >= 1");
  if (snr_db_list.empty()) throw ConfigError("tde sweep: empty SNR list");
  scenario.validate();

  const std::size_t m = scenario.path_count();
  std::vector<double> true_sorted = scenario.delays;
  std::sort(true_sorted.begin(), true_sorted.end());

  TdeSweepResult out;
  for (std::size_t si = 0; si < snr_db_list.size(); ++si) {
    const double snr_db = snr_db_list[si];
    TdeScenario sc = scenario;
    sc.noise_sigma2_cont =
        TdeScenario::sigma2_cont_for_snr(sc.pulse, sc.sample_interval, snr_db);

    std::vector<std::vector<TdeTrialRecord>> per_trial(trials);
    parallel_for(trials, threads, [&](std::size_t ti) {
      RandomStream rng = RandomStream::for_counter(master_seed, si, ti);
      std::vector<TdeTrialRecord>& rows = per_trial[ti];
      rows.reserve(m);
      try {
        const std::vector<double> r = synthesize_received(sc, &rng);
        const DelayEstimate est = estimate_delays(r, sc.pulse, m, threshold_fraction, search,
                                                  sc.sample_interval);
        for (std::size_t k = 0; k < m; ++k) {
          TdeTrialRecord rec;
          rec.snr_db = snr_db;
          rec.trial = ti;
          rec.tau_true = true_sorted[k];
          rec.tau_hat = est.delays[k];
          rec.abs_error = std::abs(est.delays[k] - true_sorted[k]);
          rec.residual = est.residual;
          rows.push_back(rec);
        }
      } catch (const std::runtime_error&) {
        for (std::size_t k = 0; k < m; ++k) {
          TdeTrialRecord rec;
          rec.snr_db = snr_db;
          rec.trial = ti;
          rec.tau_true = true_sorted[k];
          rec.tau_hat = NAN;
          rec.abs_error = NAN;
          rec.residual = NAN;
          rec.failed = true;
          rows.push_back(rec);
        }
      }
    });

    TdeSnrStats st;
    st.snr_db = snr_db;
    st.trials = trials;
    st.rmse.assign(m, 0.0);
    st.median_abs.assign(m, 0.0);
    std::vector<std::vector<double>> abs_errors(m);
    std::size_t ok = 0;
    for (const auto& rows : per_trial) {
      if (rows.empty()) continue;
      if (rows.front().failed) {
        ++st.failures;
      } else {
        ++ok;
        for (std::size_t k = 0; k < m; ++k) {
          st.rmse[k] += rows[k].abs_error * rows[k].abs_error;
          abs_errors[k].push_back(rows[k].abs_error);
        }
      }
      out.records.insert(out.records.end(), rows.begin(), rows.end());
    }
    for (std::size_t k = 0; k < m; ++k) {
      st.rmse[k] = ok ? std::sqrt(st.rmse[k] / static_cast<double>(ok)) : NAN;
      if (!abs_errors[k].empty()) {
        std::sort(abs_errors[k].begin(), abs_errors[k].end());
        st.median_abs[k] = abs_errors[k][abs_errors[k].size() / 2];
      } else {
        st.median_abs[k] = NAN;
      }
    }
    out.stats.push_back(std::move(st));
  }
  return out;
}

std::vector<CaptureRecord> constellation_capture(const LinkConfig& cfg, double ebn0_db,
                                                 std::size_t n_symbols, std::uint64_t seed) {
  cfg.validate();
  if (cfg.stbc.name == StbcName::None)
    throw ConfigError("constellation capture requires the g2 or g3 scheme");
  const Constellation c = Constellation::qam(cfg.constellation_order);
  const FramePlan plan = plan_frame(cfg);
  const double sigma2 = cfg.noiseless ? 0.0 : noise_variance_for(cfg, plan, ebn0_db);
  const double scale = cfg.tx_scale();
  RandomStream rng(seed);

  std::vector<CaptureRecord> records;
  records.reserve(n_symbols);
  const std::size_t per_block = static_cast<std::size_t>(cfg.stbc.symbols);
  std::vector<cxd> block_syms(per_block);
  std::vector<unsigned> labels(per_block);
  ChannelMatrix h;
  if (cfg.fading_window == FadingWindow::PerFrame || cfg.channel != ChannelModel::RayleighIid)
    h = draw_channel(cfg, rng);

  while (records.size() < n_symbols) {
    for (std::size_t k = 0; k < per_block; ++k) {
      labels[k] = static_cast<unsigned>(rng.bits() % static_cast<std::uint64_t>(c.order()));
      block_syms[k] = c.point(labels[k]);
    }
    if (cfg.fading_window == FadingWindow::PerBlock && cfg.channel == ChannelModel::RayleighIid)
      h = rayleigh_realization(cfg.n_rx, cfg.stbc.n_tx, rng);
    const SpaceTimeBlock tx = stbc_encode(block_syms, cfg.stbc) * scale;
    const ReceivedFrame frame = apply_channel_var(tx, h, sigma2, &rng);
    const DetectionResult det = stbc_detect(frame, h, cfg.stbc, c, scale);
    const double post_var = sigma2 / (det.gain * scale * scale);
    for (std::size_t k = 0; k < per_block && records.size() < n_symbols; ++k) {
      CaptureRecord rec;
      rec.rx = det.soft[k];
      rec.tx = block_syms[k];
      rec.label = labels[k];
      rec.post_noise_variance = post_var;
      records.push_back(rec);
    }
  }
  return records;
}

}  // namespace linksim
