#pragma once

// Experiment parameters and the unit conversions that tie them together.
//
// Internal units: time in picoseconds, angular frequency in rad/ps,
// wavelength in nm, rates in 1/s, durations in s. Conversions to and from
// those units happen here and nowhere else.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qmwp/errors.hpp"

namespace qmwp {

namespace units {
inline constexpr double ps_per_s = 1e12;
inline constexpr double ps_per_ns = 1e3;
inline constexpr double fs_per_ps = 1e3;
/// Speed of light in nm/ps.
inline constexpr double c_nm_per_ps = 299792.458;
/// FWHM of a Gaussian in units of its standard deviation.
inline const double fwhm_per_sigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

/// Hz -> rad/ps.
constexpr double angular_ps(double freq_hz) {
  return 2.0 * std::numbers::pi * freq_hz / ps_per_s;
}
}  // namespace units

struct SourceParams {
  double pair_rate = 1e6;              // pairs/s
  double duration = 1.0;               // s
  double corr_width_tau_c = 1.0;       // ps, |psi|^2 ~ exp(-2 d^2 / tau_c^2)
  double spectral_fwhm_lambda = 2.4;   // nm, marginal idler bandwidth
  double center_wavelength = 1560.0;   // nm
  std::uint64_t seed = 1;
};

struct LinkParams {
  double rf_freq = 2e9;                              // Hz
  double rf_mod_index = 0.6;                         // pi * V / V_pi
  double mzm_bias_phase = std::numbers::pi / 2.0;    // rad, pi/2 = quadrature
  double rf_phase = 0.0;                             // rad, referenced to sync t = 0
  double gvd = 0.0;                                  // ps/nm
  double beta1 = 0.0;                                // ps
  double beta2 = 0.0;                                // ps^2, derived from gvd
  bool modulate_after_dispersion = false;
};

struct DetectorParams {
  double efficiency = 0.7;
  double jitter_fwhm = 50.0;  // ps
  double dark_rate = 100.0;   // 1/s
};

struct TcspcParams {
  double sync_period = 100.0;      // ns
  double bin_resolution = 8.0;     // ps
  double measurement_time = 1.0;   // s

  double sync_period_ps() const { return sync_period * units::ps_per_ns; }
  std::int64_t bins_per_period() const {
    return static_cast<std::int64_t>(std::llround(sync_period_ps() / bin_resolution));
  }
  /// Sampling frequency of the folded waveform in Hz.
  double sampling_rate_hz() const { return units::ps_per_s / bin_resolution; }
};

/// Classical pulsed-carrier reference used by the theory curves.
struct ClassicalParams {
  double pulse_width_tau_p = 2000.0;  // ps
};

/// Quantities filled in by validate_config.
struct DerivedParams {
  double beta2 = 0.0;                 // ps^2
  double sigma_omega = 0.0;           // rad/ps, idler detuning std
  double sigma_delta = 0.0;           // ps, emission time-difference std
  double jitter_sigma_signal = 0.0;   // ps
  double jitter_sigma_idler = 0.0;    // ps
  double dispersion_spread = 0.0;     // ps, std of the dispersion-induced delay
  std::int64_t bins_per_period = 0;
};

struct ExperimentConfig {
  SourceParams source;
  LinkParams link;
  DetectorParams detector_signal;
  DetectorParams detector_idler;
  TcspcParams tcspc;
  ClassicalParams classical;
  DerivedParams derived;
  std::vector<std::string> warnings;
};

/// Quadratic spectral-phase coefficient for a dispersion of `gvd` ps/nm at
/// `wavelength` nm. A photon detuned by d_omega is delayed by
/// 2 * beta2 * d_omega.
inline double gvd_to_beta2(double gvd, double wavelength) {
  if (!(wavelength > 0.0)) throw ParameterError("wavelength", "must be positive");
  return gvd * wavelength * wavelength / (4.0 * std::numbers::pi * units::c_nm_per_ps);
}

inline double fwhm_to_sigma(double fwhm) {
  if (!(fwhm >= 0.0)) throw ParameterError("fwhm", "must be non-negative");
  return fwhm / units::fwhm_per_sigma;
}

inline double sigma_to_fwhm(double sigma) {
  if (!(sigma >= 0.0)) throw ParameterError("sigma", "must be non-negative");
  return sigma * units::fwhm_per_sigma;
}

/// FWHM of the emission time-difference distribution exp(-2 d^2 / tau_c^2).
inline double correlation_fwhm(double tau_c) {
  return tau_c * std::sqrt(2.0 * std::numbers::ln2);
}

/// Coincidence-peak FWHM expected from two detector jitters and the source
/// correlation width, all Gaussian.
inline double predicted_coincidence_fwhm(double jitter1_fwhm, double jitter2_fwhm,
                                         double tau_c) {
  if (!(jitter1_fwhm >= 0.0)) throw ParameterError("jitter1_fwhm", "must be non-negative");
  if (!(jitter2_fwhm >= 0.0)) throw ParameterError("jitter2_fwhm", "must be non-negative");
  if (!(tau_c >= 0.0)) throw ParameterError("tau_c", "must be non-negative");
  const double wc = correlation_fwhm(tau_c);
  return std::sqrt(jitter1_fwhm * jitter1_fwhm + jitter2_fwhm * jitter2_fwhm + wc * wc);
}

/// Angular-frequency std (rad/ps) of a Gaussian spectrum with the given
/// wavelength FWHM.
inline double wavelength_fwhm_to_sigma_omega(double fwhm_nm, double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw ParameterError("wavelength", "must be positive");
  const double sigma_lambda = fwhm_to_sigma(fwhm_nm);
  return 2.0 * std::numbers::pi * units::c_nm_per_ps * sigma_lambda /
         (wavelength_nm * wavelength_nm);
}

/// Checks every invariant, collecting all violations into one ConfigError,
/// and fills `derived` (plus link.beta2).
inline ExperimentConfig validate_config(ExperimentConfig cfg) {
  std::vector<std::string> errs;
  auto require = [&](bool ok, const std::string& field, const std::string& what) {
    if (!ok) errs.push_back(field + ": " + what);
  };
  auto finite = [](double v) { return std::isfinite(v); };

  const auto& s = cfg.source;
  require(finite(s.pair_rate) && s.pair_rate >= 0, "source.pair_rate", "must be >= 0");
  require(finite(s.duration) && s.duration >= 0, "source.duration", "must be >= 0");
  require(finite(s.corr_width_tau_c) && s.corr_width_tau_c > 0, "source.corr_width_tau_c",
          "must be > 0");
  require(finite(s.spectral_fwhm_lambda) && s.spectral_fwhm_lambda > 0,
          "source.spectral_fwhm_lambda", "must be > 0");
  require(finite(s.center_wavelength) && s.center_wavelength > 0, "source.center_wavelength",
          "must be > 0");

  const auto& l = cfg.link;
  require(finite(l.rf_freq) && l.rf_freq > 0, "link.rf_freq", "must be > 0");
  require(finite(l.rf_mod_index) && l.rf_mod_index >= 0, "link.rf_mod_index", "must be >= 0");
  require(finite(l.mzm_bias_phase), "link.mzm_bias_phase", "must be finite");
  require(finite(l.rf_phase), "link.rf_phase", "must be finite");
  require(finite(l.gvd) && l.gvd >= 0, "link.gvd", "must be >= 0");
  require(finite(l.beta1), "link.beta1", "must be finite");

  for (const auto& [name, d] : {std::pair{"detector_signal", &cfg.detector_signal},
                                std::pair{"detector_idler", &cfg.detector_idler}}) {
    const std::string p = name;
    require(finite(d->efficiency) && d->efficiency >= 0 && d->efficiency <= 1,
            p + ".efficiency", "must be within [0, 1]");
    require(finite(d->jitter_fwhm) && d->jitter_fwhm >= 0, p + ".jitter_fwhm", "must be >= 0");
    require(finite(d->dark_rate) && d->dark_rate >= 0, p + ".dark_rate", "must be >= 0");
  }

  const auto& t = cfg.tcspc;
  require(finite(t.sync_period) && t.sync_period > 0, "tcspc.sync_period", "must be > 0");
  require(finite(t.bin_resolution) && t.bin_resolution > 0, "tcspc.bin_resolution",
          "must be > 0");
  require(finite(t.measurement_time) && t.measurement_time > 0, "tcspc.measurement_time",
          "must be > 0");
  if (t.sync_period > 0 && t.bin_resolution > 0) {
    const double ratio = t.sync_period_ps() / t.bin_resolution;
    require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio, "tcspc.sync_period",
            "must be an integer multiple of tcspc.bin_resolution");
  }

  require(finite(cfg.classical.pulse_width_tau_p) && cfg.classical.pulse_width_tau_p > 0,
          "classical.pulse_width_tau_p", "must be > 0");

  if (!errs.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  auto& d = cfg.derived;
  d.beta2 = gvd_to_beta2(l.gvd, s.center_wavelength);
  cfg.link.beta2 = d.beta2;
  d.sigma_omega = wavelength_fwhm_to_sigma_omega(s.spectral_fwhm_lambda, s.center_wavelength);
  d.sigma_delta = s.corr_width_tau_c / 2.0;
  d.jitter_sigma_signal = fwhm_to_sigma(cfg.detector_signal.jitter_fwhm);
  d.jitter_sigma_idler = fwhm_to_sigma(cfg.detector_idler.jitter_fwhm);
  d.dispersion_spread = 2.0 * d.beta2 * d.sigma_omega;
  d.bins_per_period = t.bins_per_period();

  cfg.warnings.clear();
  if (l.rf_mod_index > std::numbers::pi)
    cfg.warnings.push_back("link.rf_mod_index exceeds pi: modulator overdriven");
  const double cycles = l.rf_freq * t.sync_period * 1e-9;
  if (std::abs(cycles - std::round(cycles)) > 1e-6)
    cfg.warnings.push_back(
        "link.rf_freq is not an integer multiple of the sync rate: folded tone will smear");
  if (t.measurement_time < s.duration)
    cfg.warnings.push_back(
        "tcspc.measurement_time is shorter than source.duration: late events are not recorded");
  return cfg;
}

}  // namespace qmwp
