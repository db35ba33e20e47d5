#pragma once

// RoF link applied to the idler arm: MZM intensity modulation, chromatic
// dispersion, single-photon detection and TCSPC T3 recording.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "qmwp/errors.hpp"
#include "qmwp/params.hpp"
#include "qmwp/rng.hpp"
#include "qmwp/source.hpp"

namespace qmwp {

/// Detected events of one channel.
struct TimeTagStream {
  int channel_id = 0;
  std::vector<double> times;         // ps, sorted
  std::vector<std::uint8_t> is_dark;  // diagnostics only, parallel to times

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

struct T3Record {
  std::int64_t nsync = 0;
  std::int32_t dtime_bin = 0;

  friend bool operator==(const T3Record&, const T3Record&) = default;
};

struct T3Stream {
  std::vector<T3Record> records;
  double sync_period_ps = 0.0;
  double bin_resolution = 0.0;
  std::int64_t bins_per_period = 0;
};

namespace channel {
inline constexpr int signal = 0;
inline constexpr int idler = 1;
}  // namespace channel

/// MZM power transmission at time t (ps):
/// 1/2 [1 - cos(phi_b + beta cos(omega_rf t + phi_rf))].
inline double mzm_transmission(double t, const LinkParams& link) {
  const double omega = units::angular_ps(link.rf_freq);
  return 0.5 * (1.0 - std::cos(link.mzm_bias_phase +
                               link.rf_mod_index * std::cos(omega * t + link.rf_phase)));
}

inline bool is_overdriven(const LinkParams& link) {
  return link.rf_mod_index > std::numbers::pi;
}

/// Thins the idler arm through the modulator. A pair's idler survives with
/// probability mzm_transmission(t_idler); the decision is keyed by (seed, id)
/// so it does not depend on event order. Signal photons are never touched:
/// a pair whose idler is absorbed keeps its signal with idler_present = false.
inline PairStream modulate(PairStream stream, const LinkParams& link, std::uint64_t seed) {
  if (!(link.rf_mod_index >= 0.0)) throw ParameterError("rf_mod_index", "must be >= 0");
  const std::uint64_t key = rng::derive_seed(seed, "modulate");
  for (auto& ev : stream.events) {
    if (!ev.idler_present) continue;
    const double p = mzm_transmission(ev.t_idler, link);
    if (!(rng::uniform01(key, ev.id) < p)) ev.idler_present = false;
  }
  return stream;
}

/// Group delay plus quadratic-phase dispersion on the idler arm:
/// t_idler += beta1 + 2 beta2 d_omega. Signal times are unchanged.
inline PairStream disperse(PairStream stream, double beta1, double beta2) {
  for (auto& ev : stream.events) ev.t_idler += beta1 + 2.0 * beta2 * ev.detuning;
  if (!std::is_sorted(stream.events.begin(), stream.events.end(),
                      [](const PairEvent& a, const PairEvent& b) { return a.t_signal < b.t_signal; }))
    std::stable_sort(stream.events.begin(), stream.events.end(),
                     [](const PairEvent& a, const PairEvent& b) { return a.t_signal < b.t_signal; });
  return stream;
}

inline std::vector<double> signal_times(const PairStream& stream) {
  std::vector<double> out;
  out.reserve(stream.events.size());
  for (const auto& ev : stream.events) out.push_back(ev.t_signal);
  return out;
}

/// Surviving idler times, sorted.
inline std::vector<double> idler_times(const PairStream& stream) {
  std::vector<double> out;
  out.reserve(stream.events.size());
  for (const auto& ev : stream.events)
    if (ev.idler_present) out.push_back(ev.t_idler);
  std::sort(out.begin(), out.end());
  return out;
}

inline void check_detector_params(const DetectorParams& det) {
  if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0))
    throw ParameterError("efficiency", "must be within [0, 1]");
  if (!(det.jitter_fwhm >= 0.0)) throw ParameterError("jitter_fwhm", "must be >= 0");
  if (!(det.dark_rate >= 0.0)) throw ParameterError("dark_rate", "must be >= 0");
}

/// Single-photon detector: Bernoulli efficiency, Gaussian timing jitter and a
/// Poisson dark-count background over [0, duration]. Events that land outside
/// the recording span [0, duration] are not recorded. Dead time is not
/// modelled.
inline TimeTagStream detect(std::span<const double> times, const DetectorParams& det,
                            double duration_s, std::uint64_t seed, int channel_id = 0) {
  check_detector_params(det);
  const double span = duration_s * units::ps_per_s;
  rng::Engine eng = rng::make_engine(seed, "detect");
  std::bernoulli_distribution keep(det.efficiency);
  const double sigma = fwhm_to_sigma(det.jitter_fwhm);
  std::normal_distribution<double> jitter(0.0, sigma > 0.0 ? sigma : 1.0);

  std::vector<std::pair<double, std::uint8_t>> tagged;
  tagged.reserve(static_cast<std::size_t>(static_cast<double>(times.size()) * det.efficiency) +
                 static_cast<std::size_t>(det.dark_rate * duration_s) + 16);
  for (double t : times) {
    if (!keep(eng)) continue;
    const double td = sigma > 0.0 ? t + jitter(eng) : t;
    if (td >= 0.0 && td <= span) tagged.emplace_back(td, 0);
  }
  if (det.dark_rate > 0.0 && span > 0.0) {
    rng::Engine dark_eng = rng::make_engine(seed, "dark");
    std::exponential_distribution<double> gap(det.dark_rate / units::ps_per_s);
    for (double t = gap(dark_eng); t <= span; t += gap(dark_eng)) tagged.emplace_back(t, 1);
  }
  std::sort(tagged.begin(), tagged.end());

  TimeTagStream out;
  out.channel_id = channel_id;
  out.times.reserve(tagged.size());
  out.is_dark.reserve(tagged.size());
  for (const auto& [t, dark] : tagged) {
    out.times.push_back(t);
    out.is_dark.push_back(dark);
  }
  return out;
}

inline void check_tcspc_params(const TcspcParams& tc) {
  if (!(tc.sync_period > 0.0)) throw ParameterError("sync_period", "must be > 0");
  if (!(tc.bin_resolution > 0.0)) throw ParameterError("bin_resolution", "must be > 0");
  if (!(tc.measurement_time > 0.0)) throw ParameterError("measurement_time", "must be > 0");
  const double ratio = tc.sync_period_ps() / tc.bin_resolution;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw ParameterError("sync_period", "must be an integer multiple of bin_resolution");
}

/// T3-mode quantization: nsync = floor(t / sync_period),
/// dtime_bin = floor((t mod sync_period) / bin_resolution). Events at or
/// after the measurement time are not recorded.
inline T3Stream record_t3(const TimeTagStream& stream, const TcspcParams& tc) {
  check_tcspc_params(tc);
  T3Stream out;
  out.sync_period_ps = tc.sync_period_ps();
  out.bin_resolution = tc.bin_resolution;
  out.bins_per_period = tc.bins_per_period();
  const double stop = tc.measurement_time * units::ps_per_s;
  out.records.reserve(stream.times.size());
  for (double t : stream.times) {
    if (!(t >= 0.0)) throw RecordError("negative or non-finite event time");
    if (t >= stop) continue;
    const double ns = std::floor(t / out.sync_period_ps);
    const double rem = t - ns * out.sync_period_ps;
    auto bin = static_cast<std::int64_t>(std::floor(rem / tc.bin_resolution));
    bin = std::clamp<std::int64_t>(bin, 0, out.bins_per_period - 1);
    out.records.push_back({static_cast<std::int64_t>(ns), static_cast<std::int32_t>(bin)});
  }
  return out;
}

}  // namespace qmwp
