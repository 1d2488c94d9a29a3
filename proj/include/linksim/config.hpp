#ifndef LINKSIM_CONFIG_HPP_
#define LINKSIM_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/sim.hpp"
#include "linksim/toml.hpp"

namespace linksim {

// Parsed experiment file. Sections: [modem], [fec], [stbc], [channel],
// [sweep], [stop], [capture], [tde], [tde.sweep], [doppler].
struct Experiment {
  LinkConfig link;
  std::vector<double> ebn0_db;
  StopRule stop;
  std::uint64_t master_seed = 1;

  bool has_tde = false;
  TdeScenario tde;
  SearchSpec tde_search;
  double tde_threshold_fraction = 0.1;
  double tde_band_fraction = 0.4;
  double tde_point_snr_db = 0.0;  // +inf disables noise for tde-run
  std::vector<double> tde_snr_db;
  std::size_t tde_trials = 100;

  bool has_doppler = false;
  DopplerParams doppler;
  double doppler_f_min = -500.0;
  double doppler_f_max = 500.0;
  std::size_t doppler_points = 1001;

  std::size_t capture_symbols = 2000;
  double capture_ebn0_db = 10.0;
};

Experiment load_experiment(const toml::Document& doc);
Experiment load_experiment_file(const std::string& path);

// Canonical TOML text for the parsed experiment; re-parsing it yields an
// equivalent experiment.
std::string normalized_config(const Experiment& e);

}  // namespace linksim

#endif  // LINKSIM_CONFIG_HPP_
