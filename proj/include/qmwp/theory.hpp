#pragma once

// Closed-form and numeric reference curves.
//
// Classical carrier: a Gaussian pulse E(t) = exp(-t^2 / tau_p^2) whose field
// is multiplied by h(t) = 1 + cos(omega_rf t), propagated through
// G(d_omega) = exp(-i [beta1 d_omega + beta2 d_omega^2]) by an FFT round trip.
//
// Heralded photons: two descriptions of the contrast left on the heralded
// arm.
//   c1_factor / c2_factor  the erf-form factors with real arguments,
//                          valid only while tau >> walk-off >> omega w^2.
//   heralded_contrast      the full Gaussian result for the event model:
//                          with Y = emission delay - signal jitter and
//                          Z = dispersion delay + idler jitter, heralding on
//                          U = Y + Z in |U| <= tau/2 leaves the contrast
//                            signal: E[exp(i omega Y) | U in window]
//                            idler:  E[exp(-i omega Z) | U in window]
//                          which is the complex-argument erf form evaluated
//                          by quadrature.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qmwp/analysis.hpp"
#include "qmwp/errors.hpp"
#include "qmwp/fft.hpp"
#include "qmwp/params.hpp"

namespace qmwp {

struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  double dt = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(std::floor((t_max - t_min) / dt)); }
};

struct ClassicalCarrier {
  double pulse_width_tau_p = 0.0;  // ps
  double rf_omega = 0.0;           // rad/ps
  double beta1 = 0.0;              // ps
  double beta2 = 0.0;              // ps^2
  TimeGrid grid;
};

struct ClassicalWaveform {
  std::vector<double> times;      // ps
  std::vector<double> intensity;  // |E''(t)|^2
  double rf_amplitude = 0.0;      // 2 |I(omega_rf)| / I(0)
  double rf_phase = 0.0;          // rad
  double rf_reference = 0.0;      // rf_amplitude of the unpropagated pulse
};

struct HeraldFactors {
  double window_tau = 0.0;     // ps
  double corr_width_w = 0.0;   // ps
  double walkoff_delta = 0.0;  // ps, 4 beta2 omega_rf
  double phase = 0.0;          // rad, -beta2 omega_rf^2
};

/// Timing spreads entering the heralded-contrast calculation.
struct PairTimingModel {
  double sigma_signal_side = 0.0;  // ps, std of (emission delay - signal jitter)
  double sigma_idler_side = 0.0;   // ps, std of (dispersion delay + idler jitter)
  double rf_omega = 0.0;           // rad/ps
  double beta1 = 0.0;              // ps
  double beta2 = 0.0;              // ps^2

  double sigma_lag() const { return std::hypot(sigma_signal_side, sigma_idler_side); }
};

struct HeraldedTone {
  double amplitude = 0.0;
  double phase = 0.0;
};

struct FomCurve {
  std::vector<double> taus;
  std::vector<double> fom;
  std::size_t argmax_index = 0;
  double argmax_tau = 0.0;
};

/// Broadened 1/e field half-width of the dispersed Gaussian pulse.
inline double broadened_pulse_width(double tau_p, double beta2) {
  const double r = 4.0 * beta2 / (tau_p * tau_p);
  return tau_p * std::sqrt(1.0 + r * r);
}

/// Grid that satisfies the resolution checks of classical_pulsed_waveform
/// with a factor-of-two margin.
inline TimeGrid auto_grid(double tau_p, double rf_omega, double beta1, double beta2) {
  const double spread = broadened_pulse_width(tau_p, beta2) + 2.0 * std::abs(beta2) * rf_omega;
  const double dt = std::min(tau_p, 1.0 / rf_omega) / 16.0;
  const double lo = std::min(0.0, beta1) - 8.0 * spread;
  const double hi = std::max(0.0, beta1) + 8.0 * spread;
  return {lo, hi, dt};
}

inline void check_grid(const ClassicalCarrier& c) {
  if (!(c.pulse_width_tau_p > 0.0)) throw ParameterError("pulse_width_tau_p", "must be > 0");
  if (!(c.rf_omega > 0.0)) throw ParameterError("rf_omega", "must be > 0");
  if (!(c.grid.dt > 0.0)) throw ParameterError("dt", "must be > 0");
  const double spread =
      broadened_pulse_width(c.pulse_width_tau_p, c.beta2) + 2.0 * std::abs(c.beta2) * c.rf_omega;
  if (c.grid.dt > c.pulse_width_tau_p / 8.0 || c.grid.dt > 1.0 / (8.0 * c.rf_omega))
    throw ResolutionError("grid step does not resolve tau_p and 1/omega_rf by 8 samples");
  if (c.grid.t_min > std::min(0.0, c.beta1) - 3.0 * spread ||
      c.grid.t_max < std::max(0.0, c.beta1) + 3.0 * spread)
    throw ResolutionError("grid does not span 6 broadened pulse widths around the pulse");
}

namespace detail {

inline std::vector<double> propagate_intensity(const ClassicalCarrier& c, std::span<const double> t,
                                               double beta1, double beta2) {
  const std::size_t n = t.size();
  std::vector<std::complex<double>> field(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double env = std::exp(-t[k] * t[k] / (c.pulse_width_tau_p * c.pulse_width_tau_p));
    field[k] = env * (1.0 + std::cos(c.rf_omega * t[k]));
  }
  if (beta1 != 0.0 || beta2 != 0.0) {
    auto spec = fft::cfft(field, FFTW_FORWARD);
    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(n) * c.grid.dt);
    for (std::size_t k = 0; k < n; ++k) {
      const auto kk = static_cast<double>(k <= n / 2 ? static_cast<long>(k)
                                                      : static_cast<long>(k) - static_cast<long>(n));
      const double w = kk * domega;
      spec[k] *= std::polar(1.0, -(beta1 * w + beta2 * w * w));
    }
    field = fft::cfft(spec, FFTW_BACKWARD);
    for (auto& v : field) v /= static_cast<double>(n);
  }
  std::vector<double> inten(n);
  for (std::size_t k = 0; k < n; ++k) inten[k] = std::norm(field[k]);
  return inten;
}

inline std::complex<double> rf_component(std::span<const double> t, std::span<const double> inten,
                                         double omega) {
  std::complex<double> acc = 0.0;
  double dc = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    acc += inten[k] * std::polar(1.0, omega * t[k]);
    dc += inten[k];
  }
  return 2.0 * acc / dc;
}

}  // namespace detail

/// Dispersed, modulated pulse and the magnitude/phase of its omega_rf
/// intensity component.
inline ClassicalWaveform classical_pulsed_waveform(const ClassicalCarrier& c) {
  check_grid(c);
  ClassicalWaveform out;
  const std::size_t n = c.grid.size();
  out.times.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.times[k] = c.grid.t_min + static_cast<double>(k) * c.grid.dt;

  out.intensity = detail::propagate_intensity(c, out.times, c.beta1, c.beta2);
  const auto rf = detail::rf_component(out.times, out.intensity, c.rf_omega);
  out.rf_amplitude = std::abs(rf);
  out.rf_phase = std::arg(rf);
  const auto ref_int = detail::propagate_intensity(c, out.times, 0.0, 0.0);
  out.rf_reference = std::abs(detail::rf_component(out.times, ref_int, c.rf_omega));
  return out;
}

/// beta2 at which the carrier-sideband beat phases cancel:
/// beta2 omega_rf^2 = pi / 2.
inline double fading_null_beta2(double rf_omega) {
  return std::numbers::pi / 2.0 / (rf_omega * rf_omega);
}

inline HeraldFactors herald_factors(double tau, double beta2, double rf_omega, double sigma_delta,
                                    double sigma_omega) {
  HeraldFactors h;
  h.window_tau = tau;
  const double spread = 2.0 * beta2 * sigma_omega;
  h.corr_width_w = std::sqrt(sigma_delta * sigma_delta + spread * spread) * 2.0 * std::numbers::sqrt2;
  h.walkoff_delta = 4.0 * beta2 * rf_omega;
  h.phase = -beta2 * rf_omega * rf_omega;
  return h;
}

inline double c1_factor(const HeraldFactors& h) {
  const double w2 = 2.0 * h.corr_width_w;
  return 0.5 * (std::erf((h.window_tau + h.walkoff_delta) / w2) +
                std::erf((h.window_tau - h.walkoff_delta) / w2));
}

inline double c2_factor(const HeraldFactors& h) {
  const double w2 = 2.0 * h.corr_width_w;
  return 0.5 * (std::erf((h.window_tau + h.walkoff_delta) / w2) -
                std::erf((h.window_tau - h.walkoff_delta) / w2));
}

/// Whether tau >> walk-off >> omega_rf w^2 holds (by a factor of ten each),
/// the condition under which the real-argument c1_factor is accurate.
inline bool c1_regime_ok(const HeraldFactors& h, double rf_omega) {
  const double imag = rf_omega * h.corr_width_w * h.corr_width_w;
  return h.window_tau > 10.0 * h.walkoff_delta && h.walkoff_delta > 10.0 * imag;
}

/// Heralded-tone amplitude and phase from the erf-form factors.
inline HeraldedTone predicted_heralded_tone(HeraldArm arm, const HeraldFactors& h, double rf_omega,
                                            double beta1) {
  HeraldedTone t;
  if (arm == HeraldArm::signal) {
    t.amplitude = c1_factor(h);
    t.phase = h.phase;
  } else {
    t.amplitude = c2_factor(h);
    t.phase = h.phase + rf_omega * beta1;
  }
  return t;
}

/// Contrast left on the heralded arm relative to the modulation depth at the
/// MZM, for a window of full width tau centred on the coincidence peak.
inline double heralded_contrast(HeraldArm arm, double tau, const PairTimingModel& m) {
  if (!(tau >= 0.0)) throw ParameterError("tau", "must be >= 0");
  const double sy2 = m.sigma_signal_side * m.sigma_signal_side;
  const double sz2 = m.sigma_idler_side * m.sigma_idler_side;
  const double su2 = sy2 + sz2;
  const double w = m.rf_omega;
  if (su2 <= 0.0) return 1.0;
  const double cond_var = sy2 * sz2 / su2;
  const double k = (arm == HeraldArm::signal ? sy2 : sz2) / su2;
  const double base = std::exp(-0.5 * w * w * cond_var);
  const double su = std::sqrt(su2);
  const double upper = std::min(0.5 * tau, 12.0 * su);
  if (upper <= 1e-9 * su) return base;

  using boost::math::quadrature::gauss_kronrod;
  auto gauss = [&](double u) { return std::exp(-0.5 * u * u / su2); };
  const double num = gauss_kronrod<double, 61>::integrate(
      [&](double u) { return gauss(u) * std::cos(w * k * u); }, 0.0, upper, 15, 1e-13);
  const double den = gauss_kronrod<double, 61>::integrate(gauss, 0.0, upper, 15, 1e-13);
  return base * num / den;
}

/// Heralded-tone amplitude and phase from the Gaussian timing model.
inline HeraldedTone predicted_heralded_tone(HeraldArm arm, double tau, const PairTimingModel& m) {
  HeraldedTone t;
  t.amplitude = heralded_contrast(arm, tau, m);
  t.phase = -m.beta2 * m.rf_omega * m.rf_omega;
  if (arm == HeraldArm::idler) t.phase += m.rf_omega * m.beta1;
  return t;
}

/// Fraction of true coincidences inside a centred window of full width tau
/// on a Gaussian coincidence profile of std sigma.
inline double heralded_count_fraction(double tau, double sigma) {
  if (sigma <= 0.0) return tau > 0.0 ? 1.0 : 0.0;
  return std::erf(tau / (2.0 * std::numbers::sqrt2 * sigma));
}

/// fom(tau) = C(tau) sqrt(P(tau)) on the given tau grid.
inline FomCurve herald_figure_of_merit(const std::function<double(double)>& contrast,
                                       double coincidence_sigma, std::span<const double> taus) {
  if (!(coincidence_sigma >= 0.0)) throw ParameterError("sigma", "must be >= 0");
  if (taus.empty()) throw ParameterError("taus", "must not be empty");
  FomCurve c;
  c.taus.assign(taus.begin(), taus.end());
  c.fom.reserve(taus.size());
  for (double tau : taus)
    c.fom.push_back(contrast(tau) * std::sqrt(heralded_count_fraction(tau, coincidence_sigma)));
  for (std::size_t i = 1; i < c.fom.size(); ++i)
    if (c.fom[i] > c.fom[c.argmax_index]) c.argmax_index = i;
  c.argmax_tau = c.taus[c.argmax_index];
  return c;
}

inline FomCurve herald_figure_of_merit(HeraldArm arm, HeraldFactors h, double coincidence_sigma,
                                       std::span<const double> taus) {
  return herald_figure_of_merit(
      [arm, h](double tau) mutable {
        h.window_tau = tau;
        return arm == HeraldArm::signal ? c1_factor(h) : c2_factor(h);
      },
      coincidence_sigma, taus);
}

inline FomCurve herald_figure_of_merit(HeraldArm arm, const PairTimingModel& m,
                                       std::span<const double> taus) {
  return herald_figure_of_merit([arm, &m](double tau) { return heralded_contrast(arm, tau, m); },
                                m.sigma_lag(), taus);
}

/// Timing model of a validated configuration.
inline PairTimingModel timing_model(const ExperimentConfig& cfg) {
  const auto& d = cfg.derived;
  PairTimingModel m;
  m.sigma_signal_side = std::hypot(d.sigma_delta, d.jitter_sigma_signal);
  m.sigma_idler_side = std::hypot(d.dispersion_spread, d.jitter_sigma_idler);
  m.rf_omega = units::angular_ps(cfg.link.rf_freq);
  m.beta1 = cfg.link.beta1;
  m.beta2 = d.beta2;
  return m;
}

inline HeraldFactors herald_factors(const ExperimentConfig& cfg, double tau) {
  return herald_factors(tau, cfg.derived.beta2, units::angular_ps(cfg.link.rf_freq),
                        cfg.derived.sigma_delta, cfg.derived.sigma_omega);
}

/// Relative fundamental depth of the MZM transmission,
/// 2 sin(phi_b) J1(beta) / (1 - cos(phi_b) J0(beta)), by quadrature over one
/// RF period.
inline double mzm_modulation_depth(const LinkParams& link) {
  using boost::math::quadrature::gauss_kronrod;
  auto p = [&](double th) {
    return 0.5 * (1.0 - std::cos(link.mzm_bias_phase + link.rf_mod_index * std::cos(th)));
  };
  const double two_pi = 2.0 * std::numbers::pi;
  const double dc = gauss_kronrod<double, 61>::integrate(p, 0.0, two_pi, 10, 1e-14) / two_pi;
  const double c1 = gauss_kronrod<double, 61>::integrate(
                        [&](double th) { return p(th) * std::cos(th); }, 0.0, two_pi, 10, 1e-14) /
                    std::numbers::pi;
  return dc > 0.0 ? std::abs(c1) / dc : 0.0;
}

}  // namespace qmwp
