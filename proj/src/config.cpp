#include "linksim/config.hpp"

#include <cmath>
#include <sstream>

#include "linksim/csv.hpp"
#include "linksim/errors.hpp"

namespace linksim {
namespace {

unsigned parse_octal(const std::string& text, const std::string& field) {
  if (text.empty()) throw ConfigError("field '" + field + "': empty octal string");
  unsigned v = 0;
  for (char c : text) {
    if (c < '0' || c > '7')
      throw ConfigError("field '" + field + "': '" + text + "' is not octal");
    v = v * 8 + static_cast<unsigned>(c - '0');
  }
  return v;
}

std::string octal_string(unsigned v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.insert(s.begin(), static_cast<char>('0' + (v & 7u)));
    v >>= 3;
  }
  return s;
}

RscCode parse_rsc(const toml::Document& doc, const std::string& prefix, const RscCode& dflt) {
  RscCode code = dflt;
  if (doc.has(prefix + "_memory"))
    code.memory = static_cast<int>(doc.get_int(prefix + "_memory"));
  if (doc.has(prefix + "_feedback"))
    code.feedback = parse_octal(doc.get_string(prefix + "_feedback"), prefix + "_feedback");
  if (doc.has(prefix + "_feedforward")) {
    code.feedforward.clear();
    for (const std::string& s : doc.get_string_array(prefix + "_feedforward"))
      code.feedforward.push_back(parse_octal(s, prefix + "_feedforward"));
  }
  return code;
}

Coding parse_coding(const std::string& s) {
  if (s == "none") return Coding::None;
  if (s == "scc") return Coding::Scc;
  throw ConfigError("field 'fec.coding': must be none|scc, got '" + s + "'");
}

ChannelModel parse_channel(const std::string& s) {
  if (s == "awgn") return ChannelModel::Awgn;
  if (s == "rayleigh-iid") return ChannelModel::RayleighIid;
  if (s == "geometric") return ChannelModel::Geometric;
  throw ConfigError("field 'channel.model': must be awgn|rayleigh-iid|geometric, got '" + s +
                    "'");
}

}  // namespace

Experiment load_experiment(const toml::Document& doc) {
  Experiment e;
  LinkConfig& link = e.link;

  link.constellation_order = static_cast<int>(doc.get_int("modem.order", 16));

  link.coding = parse_coding(doc.get_string("fec.coding", "none"));
  if (link.coding == Coding::Scc) {
    const std::size_t n = static_cast<std::size_t>(doc.get_int("fec.interleaver_n", 4096));
    const unsigned k = static_cast<unsigned>(doc.get_int("fec.interleaver_k", 1));
    SccCode code;
    code.outer = parse_rsc(doc, "fec.outer", RscCode::outer_default());
    code.inner = parse_rsc(doc, "fec.inner", RscCode::inner_default());
    code.interleaver = InterleaverSpec::quadratic(n, k);
    code.validate();
    link.scc = std::move(code);
    link.iterations = static_cast<int>(doc.get_int("fec.iterations", 8));
    link.algorithm = decode_algorithm_from_string(doc.get_string("fec.algorithm", "log-map"));
  }

  link.stbc = StbcScheme::from_string(doc.get_string("stbc.scheme", "none"));
  const std::string norm = doc.get_string("stbc.normalization", "per-antenna");
  if (norm == "per-antenna")
    link.normalization = PowerNorm::PerAntenna;
  else if (norm == "total-power")
    link.normalization = PowerNorm::TotalPower;
  else
    throw ConfigError("field 'stbc.normalization': must be per-antenna|total-power");
  const std::string window = doc.get_string("stbc.fading_window", "per-block");
  if (window == "per-block")
    link.fading_window = FadingWindow::PerBlock;
  else if (window == "per-frame")
    link.fading_window = FadingWindow::PerFrame;
  else
    throw ConfigError("field 'stbc.fading_window': must be per-block|per-frame");

  link.channel = parse_channel(doc.get_string("channel.model", "awgn"));
  link.n_rx = static_cast<int>(doc.get_int("channel.n_rx", 1));
  if (link.channel == ChannelModel::Geometric) {
    link.geometry.n_t = link.stbc.n_tx;
    link.geometry.n_r = link.n_rx;
    link.geometry.length_t = doc.get_double("channel.array_length_tx", 0.5 * link.stbc.n_tx);
    link.geometry.length_r = doc.get_double("channel.array_length_rx", 0.5 * link.n_rx);
    link.geometry.lambda_c = doc.get_double("channel.wavelength_m", 0.15);
    const auto att = doc.get_double_array("channel.path_attenuation");
    const auto txc = doc.get_double_array("channel.path_tx_cos");
    const auto rxc = doc.get_double_array("channel.path_rx_cos");
    const auto dist = doc.get_double_array("channel.path_distance_m");
    if (att.size() != txc.size() || att.size() != rxc.size() || att.size() != dist.size())
      throw ConfigError("field 'channel.path_*': path arrays must have equal lengths");
    for (std::size_t i = 0; i < att.size(); ++i)
      link.paths.push_back(PathSpec{cxd(att[i], 0.0), txc[i], rxc[i], dist[i]});
  }

  link.frame_info_bits =
      static_cast<std::size_t>(doc.get_int("sweep.frame_info_bits", 4096));
  link.noiseless = doc.get_bool("sweep.noiseless", false);
  if (doc.has("sweep.ebn0_db")) e.ebn0_db = doc.get_double_array("sweep.ebn0_db");
  e.master_seed = static_cast<std::uint64_t>(doc.get_int("sweep.seed", 1));

  e.stop.min_errors = static_cast<std::size_t>(doc.get_int("stop.min_errors", 100));
  e.stop.max_bits = static_cast<std::size_t>(doc.get_int("stop.max_bits", 100000000));
  e.stop.max_seconds = doc.get_double("stop.max_seconds", 0.0);
  e.stop.validate();
  link.validate();

  e.capture_symbols = static_cast<std::size_t>(doc.get_int("capture.symbols", 2000));
  e.capture_ebn0_db = doc.get_double("capture.ebn0_db", 10.0);

  if (doc.has("tde.n")) {
    e.has_tde = true;
    const std::size_t n = static_cast<std::size_t>(doc.get_int("tde.n"));
    const double ts = doc.get_double("tde.sample_interval", 1.0);
    e.tde_band_fraction = doc.get_double("tde.band_fraction", 0.4);
    e.tde.pulse = TdeScenario::default_pulse(n, e.tde_band_fraction);
    e.tde.sample_interval = ts;
    e.tde.amplitudes = doc.get_double_array("tde.amplitudes");
    e.tde.delays = doc.get_double_array("tde.delays");
    e.tde_point_snr_db =
        doc.get_double("tde.snr_db", std::numeric_limits<double>::infinity());
    e.tde.noise_sigma2_cont =
        TdeScenario::sigma2_cont_for_snr(e.tde.pulse, ts, e.tde_point_snr_db);
    e.tde.validate();
    if (e.tde.path_count() > 3)
      throw ConfigError("field 'tde.delays': at most 3 paths are supported");
    e.tde_threshold_fraction = doc.get_double("tde.threshold_fraction", 0.1);
    e.tde_search.t_min = doc.get_double("tde.search_min", 0.0);
    e.tde_search.t_max = doc.get_double("tde.search_max", 0.0);
    e.tde_search.coarse_step_samples = doc.get_double("tde.coarse_step_samples", 0.25);
    e.tde_search.refine_tol_samples = doc.get_double("tde.refine_tol_samples", 1.0 / 256);
    e.tde_search.min_separation_samples =
        doc.get_double("tde.min_separation_samples", 1.0 / 64);
    e.tde_search.validate(ts);
    if (doc.has("tde.sweep.snr_db")) e.tde_snr_db = doc.get_double_array("tde.sweep.snr_db");
    e.tde_trials = static_cast<std::size_t>(doc.get_int("tde.sweep.trials", 100));
  }

  if (doc.has("doppler.f1_hz") || doc.has("doppler.f2_hz")) {
    e.has_doppler = true;
    e.doppler.c1.center_hz = doc.get_double("doppler.f1_hz", 0.0);
    e.doppler.c1.gain = doc.get_double("doppler.a1", 1.0);
    e.doppler.c1.sigma_hz = doc.get_double("doppler.sigma1_hz", 1.0);
    e.doppler.c2.center_hz = doc.get_double("doppler.f2_hz", 0.0);
    e.doppler.c2.gain = doc.get_double("doppler.a2", 0.0);
    e.doppler.c2.sigma_hz = doc.get_double("doppler.sigma2_hz", 1.0);
    e.doppler.validate();
    e.doppler_f_min = doc.get_double("doppler.f_min_hz", -500.0);
    e.doppler_f_max = doc.get_double("doppler.f_max_hz", 500.0);
    e.doppler_points = static_cast<std::size_t>(doc.get_int("doppler.points", 1001));
    if (e.doppler_points < 2 || e.doppler_f_max <= e.doppler_f_min)
      throw ConfigError("field 'doppler.f_min_hz/f_max_hz/points': invalid dump grid");
  }

  return e;
}

Experiment load_experiment_file(const std::string& path) {
  return load_experiment(toml::Document::parse_file(path));
}

std::string normalized_config(const Experiment& e) {
  std::ostringstream os;
  const LinkConfig& l = e.link;
  const auto num = [](double v) { return csv::format_double(v); };

  os << "[modem]\norder = " << l.constellation_order << "\n\n";

  os << "[fec]\ncoding = \"" << (l.coding == Coding::Scc ? "scc" : "none") << "\"\n";
  if (l.coding == Coding::Scc) {
    os << "interleaver_n = " << l.scc.interleaver.length() << "\n";
    os << "interleaver_k = " << l.scc.interleaver.multiplier() << "\n";
    os << "iterations = " << l.iterations << "\n";
    os << "algorithm = \"" << decode_algorithm_label(l.algorithm) << "\"\n";
    const auto emit_rsc = [&](const char* prefix, const RscCode& c) {
      os << prefix << "_memory = " << c.memory << "\n";
      os << prefix << "_feedback = \"" << octal_string(c.feedback) << "\"\n";
      os << prefix << "_feedforward = [";
      for (std::size_t i = 0; i < c.feedforward.size(); ++i)
        os << (i ? ", " : "") << '"' << octal_string(c.feedforward[i]) << '"';
      os << "]\n";
    };
    emit_rsc("outer", l.scc.outer);
    emit_rsc("inner", l.scc.inner);
  }
  os << "\n[stbc]\nscheme = \"" << l.stbc.label() << "\"\n";
  os << "normalization = \""
     << (l.normalization == PowerNorm::PerAntenna ? "per-antenna" : "total-power") << "\"\n";
  os << "fading_window = \""
     << (l.fading_window == FadingWindow::PerBlock ? "per-block" : "per-frame") << "\"\n";

  os << "\n[channel]\nmodel = \"";
  switch (l.channel) {
    case ChannelModel::Awgn: os << "awgn"; break;
    case ChannelModel::RayleighIid: os << "rayleigh-iid"; break;
    case ChannelModel::Geometric: os << "geometric"; break;
  }
  os << "\"\nn_rx = " << l.n_rx << "\n";
  if (l.channel == ChannelModel::Geometric) {
    os << "array_length_tx = " << num(l.geometry.length_t) << "\n";
    os << "array_length_rx = " << num(l.geometry.length_r) << "\n";
    os << "wavelength_m = " << num(l.geometry.lambda_c) << "\n";
    const auto emit_list = [&](const char* key, auto get) {
      os << key << " = [";
      for (std::size_t i = 0; i < l.paths.size(); ++i)
        os << (i ? ", " : "") << num(get(l.paths[i]));
      os << "]\n";
    };
    emit_list("path_attenuation", [](const PathSpec& p) { return p.attenuation.real(); });
    emit_list("path_tx_cos", [](const PathSpec& p) { return p.tx_cos; });
    emit_list("path_rx_cos", [](const PathSpec& p) { return p.rx_cos; });
    emit_list("path_distance_m", [](const PathSpec& p) { return p.distance_m; });
  }

  os << "\n[sweep]\n";
  if (!e.ebn0_db.empty()) {
    os << "ebn0_db = [";
    for (std::size_t i = 0; i < e.ebn0_db.size(); ++i) os << (i ? ", " : "") << num(e.ebn0_db[i]);
    os << "]\n";
  }
  os << "frame_info_bits = " << l.frame_info_bits << "\n";
  os << "noiseless = " << (l.noiseless ? "true" : "false") << "\n";
  os << "seed = " << e.master_seed << "\n";

  os << "\n[stop]\nmin_errors = " << e.stop.min_errors << "\nmax_bits = " << e.stop.max_bits
     << "\nmax_seconds = " << num(e.stop.max_seconds) << "\n";

  os << "\n[capture]\nsymbols = " << e.capture_symbols
     << "\nebn0_db = " << num(e.capture_ebn0_db) << "\n";

  if (e.has_tde) {
    os << "\n[tde]\nn = " << e.tde.size() << "\n";
    os << "sample_interval = " << num(e.tde.sample_interval) << "\n";
    os << "band_fraction = " << num(e.tde_band_fraction) << "\n";
    os << "snr_db = " << num(e.tde_point_snr_db) << "\n";
    os << "amplitudes = [";
    for (std::size_t i = 0; i < e.tde.amplitudes.size(); ++i)
      os << (i ? ", " : "") << num(e.tde.amplitudes[i]);
    os << "]\ndelays = [";
    for (std::size_t i = 0; i < e.tde.delays.size(); ++i)
      os << (i ? ", " : "") << num(e.tde.delays[i]);
    os << "]\n";
    os << "threshold_fraction = " << num(e.tde_threshold_fraction) << "\n";
    os << "search_min = " << num(e.tde_search.t_min) << "\n";
    os << "search_max = " << num(e.tde_search.t_max) << "\n";
    os << "coarse_step_samples = " << num(e.tde_search.coarse_step_samples) << "\n";
    os << "refine_tol_samples = " << num(e.tde_search.refine_tol_samples) << "\n";
    os << "min_separation_samples = " << num(e.tde_search.min_separation_samples) << "\n";
    os << "\n[tde.sweep]\n";
    if (!e.tde_snr_db.empty()) {
      os << "snr_db = [";
      for (std::size_t i = 0; i < e.tde_snr_db.size(); ++i)
        os << (i ? ", " : "") << num(e.tde_snr_db[i]);
      os << "]\n";
    }
    os << "trials = " << e.tde_trials << "\n";
  }

  if (e.has_doppler) {
    os << "\n[doppler]\n";
    os << "f1_hz = " << num(e.doppler.c1.center_hz) << "\na1 = " << num(e.doppler.c1.gain)
       << "\nsigma1_hz = " << num(e.doppler.c1.sigma_hz) << "\n";
    os << "f2_hz = " << num(e.doppler.c2.center_hz) << "\na2 = " << num(e.doppler.c2.gain)
       << "\nsigma2_hz = " << num(e.doppler.c2.sigma_hz) << "\n";
    os << "f_min_hz = " << num(e.doppler_f_min) << "\nf_max_hz = " << num(e.doppler_f_max)
       << "\npoints = " << e.doppler_points << "\n";
  }
  return os.str();
}

}  // namespace linksim
