#include "linksim/tde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "linksim/dsp.hpp"
#include "linksim/errors.hpp"

namespace linksim {
namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Eigen::MatrixXcd thin_q(const Eigen::MatrixXcd& p) {
  const Eigen::Index m = p.cols();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(p);
  // Coincident delays make the steered columns linearly dependent.
  const auto& rdiag = qr.matrixQR();
  const double r00 = std::abs(rdiag(0, 0));
  for (Eigen::Index i = 0; i < m; ++i)
    if (std::abs(rdiag(i, i)) <= 1.0e-12 * std::max(r00, 1.0e-300))
      throw DegenerateDelaysError("steered basis is rank deficient (coincident delays)");
  return qr.householderQ() * Eigen::MatrixXcd::Identity(p.rows(), m);
}

}  // namespace

void TdeScenario::validate() const {
  if (!power_of_two(pulse.size()))
    throw std::invalid_argument("tde: pulse length must be a power of two");
  if (!(sample_interval > 0.0))
    throw std::invalid_argument("tde: sample interval must be > 0");
  if (delays.empty() || amplitudes.size() != delays.size())
    throw std::invalid_argument("tde: need matching, non-empty amplitude and delay vectors");
  for (double tau : delays)
    if (tau < 0.0 || tau >= window())
      throw std::invalid_argument("tde: delay outside the observation window");
  if (noise_sigma2_cont < 0.0)
    throw std::invalid_argument("tde: noise variance must be >= 0");
}

double TdeScenario::sigma2_cont_for_snr(const std::vector<double>& pulse,
                                        double sample_interval, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
  const double energy = std::inner_product(pulse.begin(), pulse.end(), pulse.begin(), 0.0);
  const double snr = std::pow(10.0, snr_db / 10.0);
  const double sigma2_sample = energy / (static_cast<double>(pulse.size()) * snr);
  return sigma2_sample * sample_interval;
}

std::vector<double> TdeScenario::default_pulse(std::size_t n, double band_fraction) {
  if (!power_of_two(n)) throw std::invalid_argument("tde: pulse length must be a power of two");
  if (!(band_fraction > 0.0) || band_fraction > 1.0)
    throw std::invalid_argument("tde: band fraction must be in (0, 1]");
  std::vector<double> s(n);
  const double center = static_cast<double>(n) / 2.0;
  const double width = static_cast<double>(n) / 8.0;  // Gaussian window
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - center;
    const double x = band_fraction * t;
    const double sinc = (x == 0.0) ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
    s[i] = sinc * std::exp(-0.5 * (t / width) * (t / width));
  }
  const double energy = std::inner_product(s.begin(), s.end(), s.begin(), 0.0);
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : s) v *= scale;
  return s;
}

std::vector<double> synthesize_received(const TdeScenario& scenario, RandomStream* rng) {
  scenario.validate();
  const std::size_t n = scenario.size();
  const double ts = scenario.sample_interval;
  const std::vector<cxd> spectrum = dft_real(scenario.pulse);

  // Per-bin multipath response sum_k a_k exp(-j 2 pi f_q tau_k) using
  // signed frequencies so conjugate symmetry is preserved exactly.
  std::vector<cxd> shifted(n, cxd(0.0, 0.0));
  for (std::size_t q = 0; q <= n / 2; ++q) {
    cxd resp(0.0, 0.0);
    for (std::size_t k = 0; k < scenario.path_count(); ++k) {
      const double phase = -2.0 * M_PI * static_cast<double>(q) * scenario.delays[k] /
                           (static_cast<double>(n) * ts);
      if (q == n / 2) {
        resp += scenario.amplitudes[k] * std::cos(phase);  // Nyquist bin stays real
      } else {
        resp += scenario.amplitudes[k] * cxd(std::cos(phase), std::sin(phase));
      }
    }
    shifted[q] = spectrum[q] * resp;
    if (q != 0 && q != n / 2) shifted[n - q] = std::conj(shifted[q]);
  }
  const std::vector<cxd> time = idft(shifted);

  std::vector<double> r(n);
  const double sigma = std::sqrt(scenario.sample_noise_variance());
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = time[i].real();
    if (sigma > 0.0) {
      if (!rng) throw std::invalid_argument("tde: rng required when noise is enabled");
      r[i] += sigma * rng->gaussian();
    }
  }
  return r;
}

SpectralSelection select_bins(const std::vector<double>& pulse, double threshold_fraction,
                              double sample_interval) {
  if (!(threshold_fraction > 0.0) || threshold_fraction >= 1.0)
    throw std::invalid_argument("tde: threshold fraction must be in (0, 1)");
  if (!power_of_two(pulse.size()))
    throw std::invalid_argument("tde: pulse length must be a power of two");
  const std::vector<cxd> spectrum = dft_real(pulse);
  const std::size_t half = pulse.size() / 2;
  double peak = 0.0;
  for (std::size_t q = 0; q < half; ++q) peak = std::max(peak, std::abs(spectrum[q]));
  SpectralSelection sel;
  sel.threshold = threshold_fraction * peak;
  sel.fft_size = pulse.size();
  sel.sample_interval = sample_interval;
  for (std::size_t q = 0; q < half; ++q) {
    if (std::abs(spectrum[q]) > sel.threshold) {
      sel.bins.push_back(q);
      sel.pulse_spectrum.push_back(spectrum[q]);
    }
  }
  if (sel.bins.empty())
    throw IdentifiabilityError("tde: spectral selection is empty; lower the threshold");
  return sel;
}

std::vector<double> delays_to_lambda(const std::vector<double>& delays, std::size_t n,
                                     double sample_interval) {
  std::vector<double> lambda(delays.size());
  for (std::size_t k = 0; k < delays.size(); ++k)
    lambda[k] = -2.0 * M_PI * delays[k] / (static_cast<double>(n) * sample_interval);
  return lambda;
}

Eigen::MatrixXcd steering_matrix(const std::vector<double>& lambda,
                                 const std::vector<std::size_t>& bins) {
  if (bins.empty()) throw std::invalid_argument("tde: steering matrix needs bins");
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(bins.size()),
                     static_cast<Eigen::Index>(lambda.size()));
  for (std::size_t l = 0; l < bins.size(); ++l)
    for (std::size_t m = 0; m < lambda.size(); ++m) {
      const double phase = lambda[m] * static_cast<double>(bins[l]);
      a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) =
          cxd(std::cos(phase), std::sin(phase));
    }
  return a;
}

Eigen::MatrixXcd steered_basis(const SpectralSelection& sel, const std::vector<double>& lambda) {
  Eigen::MatrixXcd p = steering_matrix(lambda, sel.bins);
  for (Eigen::Index l = 0; l < p.rows(); ++l) p.row(l) *= sel.pulse_spectrum[l];
  return p;
}

Eigen::VectorXcd observed_spectrum(const std::vector<double>& received,
                                   const SpectralSelection& sel) {
  if (received.size() != sel.fft_size)
    throw std::invalid_argument("tde: received length does not match the selection");
  const std::vector<cxd> spectrum = dft_real(received);
  Eigen::VectorXcd r(static_cast<Eigen::Index>(sel.bins.size()));
  for (std::size_t l = 0; l < sel.bins.size(); ++l)
    r(static_cast<Eigen::Index>(l)) = spectrum[sel.bins[l]];
  return r;
}

double projected_error(const std::vector<double>& lambda, const SpectralSelection& sel,
                       const Eigen::VectorXcd& r_tilde) {
  const Eigen::MatrixXcd q = thin_q(steered_basis(sel, lambda));
  const Eigen::VectorXcd residual = r_tilde - q * (q.adjoint() * r_tilde);
  return residual.squaredNorm();
}

Eigen::VectorXcd solve_amplitudes(const std::vector<double>& lambda,
                                  const SpectralSelection& sel,
                                  const Eigen::VectorXcd& r_tilde) {
  const Eigen::MatrixXcd p = steered_basis(sel, lambda);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(p);
  const double r00 = std::abs(qr.matrixQR()(0, 0));
  for (Eigen::Index i = 0; i < p.cols(); ++i)
    if (std::abs(qr.matrixQR()(i, i)) <= 1.0e-12 * std::max(r00, 1.0e-300))
      throw DegenerateDelaysError("steered basis is rank deficient (coincident delays)");
  return qr.solve(r_tilde);
}

void SearchSpec::validate(double sample_interval) const {
  (void)sample_interval;
  if (!(coarse_step_samples > 0.0)) throw ConfigError("tde search: coarse step must be > 0");
  if (!(refine_tol_samples > 0.0)) throw ConfigError("tde search: refine tolerance must be > 0");
  if (!(min_separation_samples > 0.0))
    throw ConfigError("tde search: minimum separation must be > 0");
  if (t_max > 0.0 && t_max <= t_min) throw ConfigError("tde search: empty search window");
}

namespace {

// Search-loop evaluator. Builds the steered columns in place and projects
// through modified Gram-Schmidt (the progressive orthogonal columns of the
// factorization) with no allocation per candidate; degenerate tuples come
// back as infinity rather than an exception.
class SearchContext {
 public:
  SearchContext(const SpectralSelection& sel, const Eigen::VectorXcd& r_tilde, std::size_t n,
                double ts, double min_sep, std::size_t m)
      : sel_(sel),
        r_tilde_(r_tilde),
        n_(n),
        ts_(ts),
        min_sep_(min_sep),
        cols_(sel.count() * m),
        resid_(sel.count()) {}

  double ts() const { return ts_; }

  double error_at(const std::vector<double>& taus) {
    for (std::size_t i = 1; i < taus.size(); ++i)
      if (taus[i] - taus[i - 1] < min_sep_) return INFINITY;
    const std::size_t l = sel_.count();
    const std::size_t m = taus.size();
    for (std::size_t k = 0; k < m; ++k) {
      const double lambda = -2.0 * M_PI * taus[k] / (static_cast<double>(n_) * ts_);
      cxd* col = cols_.data() + k * l;
      for (std::size_t i = 0; i < l; ++i) {
        const double phase = lambda * static_cast<double>(sel_.bins[i]);
        col[i] = sel_.pulse_spectrum[i] * cxd(std::cos(phase), std::sin(phase));
      }
    }
    for (std::size_t i = 0; i < l; ++i) resid_[i] = r_tilde_(static_cast<Eigen::Index>(i));

    for (std::size_t k = 0; k < m; ++k) {
      cxd* col = cols_.data() + k * l;
      double base = 0.0;
      for (std::size_t i = 0; i < l; ++i) base += std::norm(col[i]);
      for (std::size_t j = 0; j < k; ++j) {
        const cxd* prev = cols_.data() + j * l;
        cxd dot(0.0, 0.0);
        for (std::size_t i = 0; i < l; ++i) dot += std::conj(prev[i]) * col[i];
        for (std::size_t i = 0; i < l; ++i) col[i] -= dot * prev[i];
      }
      double norm2 = 0.0;
      for (std::size_t i = 0; i < l; ++i) norm2 += std::norm(col[i]);
      if (norm2 <= 1.0e-24 * base) return INFINITY;  // rank collapse
      const double inv = 1.0 / std::sqrt(norm2);
      cxd dot(0.0, 0.0);
      for (std::size_t i = 0; i < l; ++i) {
        col[i] *= inv;
        dot += std::conj(col[i]) * resid_[i];
      }
      for (std::size_t i = 0; i < l; ++i) resid_[i] -= dot * col[i];
    }
    double err = 0.0;
    for (std::size_t i = 0; i < l; ++i) err += std::norm(resid_[i]);
    return err;
  }

 private:
  const SpectralSelection& sel_;
  const Eigen::VectorXcd& r_tilde_;
  std::size_t n_;
  double ts_;
  double min_sep_;
  std::vector<cxd> cols_;
  std::vector<cxd> resid_;
};

// Enumerates ordered path-count tuples over the coarse grid in
// lexicographic order; strict improvement keeps the first (smallest) of
// equal minima, the deterministic tie-break.
void coarse_search(SearchContext& ctx, const std::vector<double>& grid,
                   std::size_t path_count, std::vector<double>& best,
                   double& best_err, std::size_t& evals) {
  std::vector<std::size_t> idx(path_count);
  std::vector<double> taus(path_count);
  const std::size_t g = grid.size();

  const auto evaluate = [&]() {
    for (std::size_t k = 0; k < path_count; ++k) taus[k] = grid[idx[k]];
    ++evals;
    const double e = ctx.error_at(taus);
    if (e < best_err) {
      best_err = e;
      best = taus;
    }
  };

  if (path_count == 1) {
    for (idx[0] = 0; idx[0] < g; ++idx[0]) evaluate();
  } else if (path_count == 2) {
    for (idx[0] = 0; idx[0] < g; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < g; ++idx[1]) evaluate();
  } else {
    for (idx[0] = 0; idx[0] < g; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < g; ++idx[1])
        for (idx[2] = idx[1] + 1; idx[2] < g; ++idx[2]) evaluate();
  }
}

// Golden-section refinement of one coordinate; only strict improvements
// are accepted, so the candidate error never increases.
void refine_coordinate(SearchContext& ctx, std::vector<double>& taus, std::size_t k,
                       double radius, double tol, double lo_edge, double hi_edge,
                       double& best_err) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::max(lo_edge, taus[k] - radius);
  double hi = std::min(hi_edge, taus[k] + radius);
  if (hi <= lo) return;

  std::vector<double> probe = taus;
  const auto eval = [&](double t) {
    probe[k] = t;
    std::vector<double> sorted(probe);
    std::sort(sorted.begin(), sorted.end());
    return ctx.error_at(sorted);
  };

  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval(x2);
    }
  }
  const double cand = (f1 <= f2) ? x1 : x2;
  const double cand_err = (f1 <= f2) ? f1 : f2;
  if (cand_err < best_err) {
    best_err = cand_err;
    taus[k] = cand;
    std::sort(taus.begin(), taus.end());
  }
}

}  // namespace

DelayEstimate estimate_delays(const std::vector<double>& received,
                              const std::vector<double>& pulse, std::size_t path_count,
                              double threshold_fraction, const SearchSpec& search,
                              double sample_interval) {
  if (path_count < 1) throw ConfigError("tde: path count must be >= 1");
  if (path_count > 3)
    throw ConfigError("tde: grid search supports at most 3 paths, got " +
                      std::to_string(path_count));
  if (received.size() != pulse.size())
    throw std::invalid_argument("tde: received and pulse lengths differ");
  search.validate(sample_interval);

  const std::size_t n = pulse.size();
  const double ts = sample_interval;
  const double window = static_cast<double>(n) * ts;
  const double t_min = search.t_min;
  const double t_max = (search.t_max > 0.0) ? std::min(search.t_max, window) : window;
  if (t_max <= t_min) throw ConfigError("tde search: empty search window");

  SpectralSelection sel = select_bins(pulse, threshold_fraction, ts);
  if (sel.count() < path_count)
    throw IdentifiabilityError("tde: " + std::to_string(sel.count()) +
                               " selected bins cannot identify " +
                               std::to_string(path_count) + " paths");
  const Eigen::VectorXcd r_tilde = observed_spectrum(received, sel);

  SearchContext ctx(sel, r_tilde, n, ts, search.min_separation_samples * ts, path_count);

  std::vector<double> grid;
  const double step = search.coarse_step_samples * ts;
  for (double t = t_min; t < t_max; t += step) grid.push_back(t);
  if (grid.size() < path_count) throw ConfigError("tde search: grid smaller than path count");

  DelayEstimate est;
  est.grid_step = step;
  est.refine_tol = search.refine_tol_samples * ts;
  double best_err = INFINITY;
  std::vector<double> best;
  coarse_search(ctx, grid, path_count, best, best_err, est.coarse_evaluations);
  if (!std::isfinite(best_err))
    throw DegenerateDelaysError("tde: no feasible delay tuple on the coarse grid");

  const double tol = search.refine_tol_samples * ts;
  double radius = step;
  while (radius > tol) {
    for (std::size_t k = 0; k < path_count; ++k)
      refine_coordinate(ctx, best, k, radius, tol, t_min, t_max, best_err);
    radius /= 2.0;
  }

  est.delays = best;
  // Final residual and amplitudes through the standalone QR route.
  est.residual = projected_error(delays_to_lambda(best, n, ts), sel, r_tilde);
  const Eigen::VectorXcd a = solve_amplitudes(delays_to_lambda(best, n, ts), sel, r_tilde);
  est.amplitudes.assign(a.data(), a.data() + a.size());
  return est;
}

CrossCorrelation cross_correlate(const std::vector<double>& received,
                                 const std::vector<double>& pulse) {
  if (pulse.size() > received.size())
    throw std::invalid_argument("tde: pulse longer than the received record");
  const double er = std::inner_product(received.begin(), received.end(), received.begin(), 0.0);
  const double es = std::inner_product(pulse.begin(), pulse.end(), pulse.begin(), 0.0);
  if (!(er > 0.0) || !(es > 0.0))
    throw std::invalid_argument("tde: cross-correlation needs non-zero-energy inputs");

  const std::size_t n = received.size();
  CrossCorrelation out;
  out.values.resize(n);
  const double scale = 1.0 / std::sqrt(er * es);
  double best = -INFINITY;
  for (std::size_t lag = 0; lag < n; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pulse.size(); ++i) acc += received[(i + lag) % n] * pulse[i];
    out.values[lag] = acc * scale;
    if (out.values[lag] > best) {
      best = out.values[lag];
      out.peak_lag = lag;
    }
  }
  return out;
}

}  // namespace linksim
