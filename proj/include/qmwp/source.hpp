#pragma once

// Time-energy correlated photon-pair source.
//
// Emission times are a homogeneous Poisson process (CW-pumped SPDC). Per pair
// the idler-minus-signal emission delay is Gaussian with std tau_c / 2 and the
// idler carries an angular-frequency detuning d_omega ~ N(0, sigma_omega);
// the signal carries -d_omega. Delay and detuning are drawn independently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qmwp/errors.hpp"
#include "qmwp/params.hpp"
#include "qmwp/rng.hpp"

namespace qmwp {

struct PairEvent {
  double t_signal = 0.0;   // ps
  double t_idler = 0.0;    // ps
  double detuning = 0.0;   // rad/ps, idler offset
  std::uint64_t id = 0;    // emission index, stable through the link
  bool idler_present = true;
};

struct PairStream {
  std::vector<PairEvent> events;  // sorted by t_signal
  double duration = 0.0;          // s
  SourceParams params;

  double duration_ps() const { return duration * units::ps_per_s; }
};

struct PairSummary {
  std::size_t count = 0;
  double empirical_rate = 0.0;  // 1/s
  std::optional<double> mean_delta;     // ps, t_idler - t_signal
  std::optional<double> std_delta;      // ps
  std::optional<double> std_detuning;   // rad/ps
  std::optional<double> min_time;       // ps, t_signal
  std::optional<double> max_time;       // ps
};

inline void check_source_params(const SourceParams& src) {
  if (!(src.pair_rate >= 0.0)) throw ParameterError("pair_rate", "must be >= 0");
  if (!(src.duration >= 0.0)) throw ParameterError("duration", "must be >= 0");
  if (!(src.corr_width_tau_c > 0.0)) throw ParameterError("corr_width_tau_c", "must be > 0");
  if (!(src.spectral_fwhm_lambda > 0.0))
    throw ParameterError("spectral_fwhm_lambda", "must be > 0");
  if (!(src.center_wavelength > 0.0)) throw ParameterError("center_wavelength", "must be > 0");
}

/// Samples a pair stream over [0, duration].
///
/// The span is cut into chunks of `chunk_seconds`; each chunk draws from its
/// own substream of the seed, so the result is a deterministic function of
/// (params, chunk_seconds) and chunks could be generated independently.
inline PairStream generate_pairs(const SourceParams& src, double chunk_seconds = 1e-3) {
  check_source_params(src);
  if (!(chunk_seconds > 0.0)) throw ParameterError("chunk_seconds", "must be > 0");

  PairStream out;
  out.duration = src.duration;
  out.params = src;
  const double span = src.duration * units::ps_per_s;
  if (span <= 0.0 || src.pair_rate <= 0.0) return out;

  const double rate_per_ps = src.pair_rate / units::ps_per_s;
  const double sigma_delta = src.corr_width_tau_c / 2.0;
  const double sigma_omega =
      wavelength_fwhm_to_sigma_omega(src.spectral_fwhm_lambda, src.center_wavelength);
  const double chunk = chunk_seconds * units::ps_per_s;

  out.events.reserve(static_cast<std::size_t>(src.pair_rate * src.duration * 1.001 + 64));
  std::uint64_t next_id = 0;
  const auto nchunks = static_cast<std::uint64_t>(std::ceil(span / chunk));
  for (std::uint64_t c = 0; c < nchunks; ++c) {
    rng::Engine eng(rng::derive_seed(rng::derive_seed(src.seed, "source"), c));
    std::exponential_distribution<double> gap(rate_per_ps);
    std::normal_distribution<double> delta(0.0, sigma_delta);
    std::normal_distribution<double> detune(0.0, sigma_omega);
    const double start = static_cast<double>(c) * chunk;
    const double stop = std::min(span, start + chunk);
    double t = start + gap(eng);
    while (t <= stop) {
      PairEvent ev;
      ev.t_signal = t;
      ev.t_idler = t + delta(eng);
      ev.detuning = detune(eng);
      ev.id = next_id++;
      out.events.push_back(ev);
      t += gap(eng);
    }
  }
  return out;
}

inline PairSummary pair_statistics(const PairStream& stream) {
  PairSummary s;
  s.count = stream.events.size();
  s.empirical_rate = stream.duration > 0.0 ? static_cast<double>(s.count) / stream.duration : 0.0;
  if (s.count == 0) return s;

  const double n = static_cast<double>(s.count);
  double sum_d = 0.0, sum_w = 0.0;
  for (const auto& e : stream.events) {
    sum_d += e.t_idler - e.t_signal;
    sum_w += e.detuning;
  }
  const double mean_d = sum_d / n;
  const double mean_w = sum_w / n;
  double var_d = 0.0, var_w = 0.0;
  double lo = stream.events.front().t_signal, hi = lo;
  for (const auto& e : stream.events) {
    const double dd = e.t_idler - e.t_signal - mean_d;
    const double dw = e.detuning - mean_w;
    var_d += dd * dd;
    var_w += dw * dw;
    lo = std::min(lo, e.t_signal);
    hi = std::max(hi, e.t_signal);
  }
  s.mean_delta = mean_d;
  s.std_delta = std::sqrt(var_d / n);
  s.std_detuning = std::sqrt(var_w / n);
  s.min_time = lo;
  s.max_time = hi;
  return s;
}

}  // namespace qmwp
