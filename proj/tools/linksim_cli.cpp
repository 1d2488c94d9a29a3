// Command-line front end: parses experiment configs, runs BER and TDE
// experiments, and emits plot-ready CSV files.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <thread>

#include "linksim/config.hpp"
#include "linksim/csv.hpp"
#include "linksim/errors.hpp"

namespace {

using namespace linksim;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::int64_t seed_override = -1;
  int threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_out) {
  cmd->add_option("--config", opts.config_path, "experiment TOML file")->required();
  auto* out = cmd->add_option("--out", opts.out_path, "output CSV path");
  if (needs_out) out->required();
  cmd->add_option("--seed", opts.seed_override, "master seed override");
  cmd->add_option("--threads", opts.threads, "worker threads (default: hardware)");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress lines");
}

int effective_threads(const CommonOpts& opts) {
  if (opts.threads > 0) return opts.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

Experiment load(const CommonOpts& opts) {
  Experiment e = load_experiment_file(opts.config_path);
  if (opts.seed_override >= 0) e.master_seed = static_cast<std::uint64_t>(opts.seed_override);
  return e;
}

int run_ber_sweep(const CommonOpts& opts) {
  const Experiment e = load(opts);
  if (e.ebn0_db.empty()) throw ConfigError("field 'sweep.ebn0_db': missing");
  const auto points =
      ber_sweep(e.link, e.ebn0_db, e.stop, e.master_seed, effective_threads(opts));
  csv::Table table({"ebn0_db", "bits", "errors", "ber", "ci95", "censored"});
  for (const BerPoint& p : points) {
    table.begin_row()
        .col(p.ebn0_db)
        .col(p.bits)
        .col(p.errors)
        .col(p.censored ? p.ber_bound : p.ber)
        .col(p.ci95)
        .col(p.censored ? 1 : 0);
    if (!opts.quiet)
      std::cerr << "ebn0 " << p.ebn0_db << " dB: ber " << csv::format_double(p.ber) << " ("
                << p.errors << "/" << p.bits << (p.censored ? ", censored" : "") << ")\n";
  }
  csv::atomic_write(opts.out_path, table.str());
  return 0;
}

int run_tde_once(const CommonOpts& opts) {
  const Experiment e = load(opts);
  if (!e.has_tde) throw ConfigError("field 'tde.n': missing ([tde] section required)");
  RandomStream rng = RandomStream::for_counter(e.master_seed, 0, 0);
  const auto received =
      synthesize_received(e.tde, e.tde.noise_sigma2_cont > 0.0 ? &rng : nullptr);
  const DelayEstimate est =
      estimate_delays(received, e.tde.pulse, e.tde.path_count(), e.tde_threshold_fraction,
                      e.tde_search, e.tde.sample_interval);
  std::vector<double> truth = e.tde.delays;
  std::sort(truth.begin(), truth.end());
  std::printf("residual %s\n", csv::format_double(est.residual).c_str());
  for (std::size_t k = 0; k < est.delays.size(); ++k)
    std::printf("path %zu: tau_hat %s  tau_true %s  amplitude (%s, %s)\n", k,
                csv::format_double(est.delays[k]).c_str(),
                csv::format_double(truth[k]).c_str(),
                csv::format_double(est.amplitudes[k].real()).c_str(),
                csv::format_double(est.amplitudes[k].imag()).c_str());
  if (!opts.out_path.empty()) {
    csv::Table table({"path", "tau_true", "tau_hat", "abs_error", "residual"});
    for (std::size_t k = 0; k < est.delays.size(); ++k)
      table.begin_row()
          .col(k)
          .col(truth[k])
          .col(est.delays[k])
          .col(std::abs(est.delays[k] - truth[k]))
          .col(est.residual);
    csv::atomic_write(opts.out_path, table.str());
  }
  return 0;
}

int run_tde_sweep(const CommonOpts& opts) {
  const Experiment e = load(opts);
  if (!e.has_tde) throw ConfigError("field 'tde.n': missing ([tde] section required)");
  if (e.tde_snr_db.empty()) throw ConfigError("field 'tde.sweep.snr_db': missing");
  const TdeSweepResult res =
      tde_sweep(e.tde, e.tde_search, e.tde_threshold_fraction, e.tde_snr_db, e.tde_trials,
                e.master_seed, effective_threads(opts));
  csv::Table table({"snr_db", "trial", "tau_true_k", "tau_hat_k", "abs_error", "residual"});
  for (const TdeTrialRecord& r : res.records)
    table.begin_row()
        .col(r.snr_db)
        .col(r.trial)
        .col(r.tau_true)
        .col(r.tau_hat)
        .col(r.abs_error)
        .col(r.residual);
  csv::atomic_write(opts.out_path, table.str());
  if (!opts.quiet) {
    for (const TdeSnrStats& s : res.stats) {
      std::cerr << "snr " << s.snr_db << " dB: failures " << s.failures << "/" << s.trials
                << ", rmse";
      for (double v : s.rmse) std::cerr << " " << csv::format_double(v);
      std::cerr << "\n";
    }
  }
  return 0;
}

int run_constellation(const CommonOpts& opts, bool ideal) {
  const Experiment e = load(opts);
  if (ideal) {
    const Constellation c = Constellation::qam(e.link.constellation_order);
    csv::Table table({"re", "im", "label_bits"});
    const int m = c.bits_per_symbol();
    for (unsigned l = 0; l < c.points().size(); ++l) {
      std::string bits;
      for (int j = 0; j < m; ++j) bits.push_back(label_bit(l, j, m) ? '1' : '0');
      table.begin_row().col(c.point(l).real()).col(c.point(l).imag()).col(bits);
    }
    csv::atomic_write(opts.out_path, table.str());
    return 0;
  }
  const auto records =
      constellation_capture(e.link, e.capture_ebn0_db, e.capture_symbols, e.master_seed);
  csv::Table table({"re", "im", "tx_re", "tx_im", "label_bits", "post_var"});
  const Constellation c = Constellation::qam(e.link.constellation_order);
  const int m = c.bits_per_symbol();
  for (const CaptureRecord& r : records) {
    std::string bits;
    for (int j = 0; j < m; ++j) bits.push_back(label_bit(r.label, j, m) ? '1' : '0');
    table.begin_row()
        .col(r.rx.real())
        .col(r.rx.imag())
        .col(r.tx.real())
        .col(r.tx.imag())
        .col(bits)
        .col(r.post_noise_variance);
  }
  csv::atomic_write(opts.out_path, table.str());
  return 0;
}

int run_psd_dump(const CommonOpts& opts) {
  const Experiment e = load(opts);
  if (!e.has_doppler) throw ConfigError("field 'doppler.f1_hz': missing ([doppler] section)");
  csv::Table table({"f_hz", "psd"});
  const double step = (e.doppler_f_max - e.doppler_f_min) /
                      static_cast<double>(e.doppler_points - 1);
  for (std::size_t i = 0; i < e.doppler_points; ++i) {
    const double f = e.doppler_f_min + step * static_cast<double>(i);
    table.begin_row().col(f).col(doppler_psd(f, e.doppler));
  }
  csv::atomic_write(opts.out_path, table.str());
  return 0;
}

int run_validate(const CommonOpts& opts, bool print_normalized) {
  const Experiment e = load(opts);
  if (print_normalized)
    std::cout << normalized_config(e);
  else if (!opts.quiet)
    std::cerr << "config ok: " << opts.config_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link-level space-time M-QAM and time-delay estimation experiments"};
  app.require_subcommand(1);

  CommonOpts ber, tde_run, tde_sw, constel, psd, validate;
  bool ideal = false, print_normalized = false;

  add_common(app.add_subcommand("ber-sweep", "BER vs Eb/N0 sweep"), ber, true);
  add_common(app.add_subcommand("tde-run", "single delay estimation run"), tde_run, false);
  add_common(app.add_subcommand("tde-sweep", "delay estimation over an SNR list"), tde_sw,
             true);
  auto* cc = app.add_subcommand("constellation", "receiver scatter capture");
  add_common(cc, constel, true);
  cc->add_flag("--ideal", ideal, "dump the transmit constellation instead");
  add_common(app.add_subcommand("psd-dump", "Doppler spectrum samples"), psd, true);
  auto* vc = app.add_subcommand("validate-config", "parse and validate a config");
  add_common(vc, validate, false);
  vc->add_flag("--print-normalized", print_normalized, "echo the normalized config");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("ber-sweep")) return run_ber_sweep(ber);
    if (app.got_subcommand("tde-run")) return run_tde_once(tde_run);
    if (app.got_subcommand("tde-sweep")) return run_tde_sweep(tde_sw);
    if (app.got_subcommand("constellation")) return run_constellation(constel, ideal);
    if (app.got_subcommand("psd-dump")) return run_psd_dump(psd);
    if (app.got_subcommand("validate-config")) return run_validate(validate, print_normalized);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const linksim::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
