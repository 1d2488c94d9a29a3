#ifndef LINKSIM_TDE_HPP_
#define LINKSIM_TDE_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "linksim/rng.hpp"

namespace linksim {

// Multipath scenario: r[n] = sum_k a_k s(n Ts - tau_k) + w[n], delays
// continuous-valued within the observation window, noise white Gaussian
// with sample variance sigma2_cont / Ts.
struct TdeScenario {
  std::vector<double> pulse;       // s[0..N-1], N a power of two
  double sample_interval = 1.0;    // Ts seconds
  std::vector<double> amplitudes;  // a_k
  std::vector<double> delays;      // tau_k seconds, in [0, N Ts)
  double noise_sigma2_cont = 0.0;  // continuous-time level; 0 disables noise

  std::size_t size() const { return pulse.size(); }
  std::size_t path_count() const { return delays.size(); }
  double window() const { return static_cast<double>(pulse.size()) * sample_interval; }
  double sample_noise_variance() const { return noise_sigma2_cont / sample_interval; }
  void validate() const;

  // SNR defined against the pulse energy: snr = E_p / (N * sigma_w^2).
  static double sigma2_cont_for_snr(const std::vector<double>& pulse, double sample_interval,
                                    double snr_db);

  // Unit-energy Gaussian-windowed sinc occupying band_fraction of the
  // two-sided Nyquist band, centered mid-window.
  static std::vector<double> default_pulse(std::size_t n, double band_fraction = 0.4);
};

std::vector<double> synthesize_received(const TdeScenario& scenario, RandomStream* rng);

// DFT bins 0..N/2-1 whose pulse magnitude exceeds
// threshold_fraction * max |S|.
struct SpectralSelection {
  std::vector<std::size_t> bins;  // ascending
  std::vector<cxd> pulse_spectrum;
  double threshold = 0.0;
  std::size_t fft_size = 0;
  double sample_interval = 1.0;

  std::size_t count() const { return bins.size(); }
};

SpectralSelection select_bins(const std::vector<double>& pulse, double threshold_fraction,
                              double sample_interval);

// lambda_k = -2 pi tau_k / (N Ts).
std::vector<double> delays_to_lambda(const std::vector<double>& delays, std::size_t n,
                                     double sample_interval);

// A[l][m] = exp(j lambda_m q_l).
Eigen::MatrixXcd steering_matrix(const std::vector<double>& lambda,
                                 const std::vector<std::size_t>& bins);

// Steered pulse basis p~ = diag(S[q]) A(lambda).
Eigen::MatrixXcd steered_basis(const SpectralSelection& sel, const std::vector<double>& lambda);

// Observed spectrum restricted to the selected bins.
Eigen::VectorXcd observed_spectrum(const std::vector<double>& received,
                                   const SpectralSelection& sel);

// Squared norm of the residual of r~ outside the column space of
// p~(lambda), computed through a thin QR factorization.
double projected_error(const std::vector<double>& lambda, const SpectralSelection& sel,
                       const Eigen::VectorXcd& r_tilde);

// Least squares amplitudes for fixed delays, by QR back-substitution.
Eigen::VectorXcd solve_amplitudes(const std::vector<double>& lambda,
                                  const SpectralSelection& sel,
                                  const Eigen::VectorXcd& r_tilde);

struct SearchSpec {
  double t_min = 0.0;   // seconds
  double t_max = 0.0;   // exclusive upper edge; <= 0 means the full window
  double coarse_step_samples = 0.25;
  double refine_tol_samples = 1.0 / 256.0;
  double min_separation_samples = 1.0 / 64.0;
  void validate(double sample_interval) const;
};

struct DelayEstimate {
  std::vector<double> delays;  // ascending, seconds
  std::vector<cxd> amplitudes;
  double residual = 0.0;
  std::size_t coarse_evaluations = 0;
  double grid_step = 0.0;
  double refine_tol = 0.0;
};

DelayEstimate estimate_delays(const std::vector<double>& received,
                              const std::vector<double>& pulse, std::size_t path_count,
                              double threshold_fraction, const SearchSpec& search,
                              double sample_interval);

// Normalized circular cross-correlation over integer lags.
struct CrossCorrelation {
  std::vector<double> values;  // one per lag 0..N-1
  std::size_t peak_lag = 0;
};

CrossCorrelation cross_correlate(const std::vector<double>& received,
                                 const std::vector<double>& pulse);

}  // namespace linksim

#endif  // LINKSIM_TDE_HPP_
