#pragma once

// End-to-end experiment in memory: source -> link -> detectors -> TCSPC, and
// the per-arm analysis chain used by the CLI.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmwp/analysis.hpp"
#include "qmwp/correlator.hpp"
#include "qmwp/errors.hpp"
#include "qmwp/link.hpp"
#include "qmwp/params.hpp"
#include "qmwp/rng.hpp"
#include "qmwp/source.hpp"

namespace qmwp {

struct SimulationRun {
  ExperimentConfig config;
  std::optional<PairStream> pairs;  // kept on request only
  std::size_t pair_count = 0;
  TimeTagStream signal;
  TimeTagStream idler;
  T3Stream t3_signal;
  T3Stream t3_idler;
};

/// Runs the full chain on a validated configuration.
inline SimulationRun simulate(const ExperimentConfig& cfg, bool keep_pairs = false) {
  const std::uint64_t seed = cfg.source.seed;
  PairStream pairs = generate_pairs(cfg.source);
  if (cfg.link.modulate_after_dispersion) {
    pairs = disperse(std::move(pairs), cfg.link.beta1, cfg.derived.beta2);
    pairs = modulate(std::move(pairs), cfg.link, seed);
  } else {
    pairs = modulate(std::move(pairs), cfg.link, seed);
    pairs = disperse(std::move(pairs), cfg.link.beta1, cfg.derived.beta2);
  }

  SimulationRun run;
  run.config = cfg;
  run.pair_count = pairs.events.size();
  run.signal = detect(signal_times(pairs), cfg.detector_signal, cfg.source.duration,
                      rng::derive_seed(seed, "detect-signal"), channel::signal);
  run.idler = detect(idler_times(pairs), cfg.detector_idler, cfg.source.duration,
                     rng::derive_seed(seed, "detect-idler"), channel::idler);
  run.t3_signal = record_t3(run.signal, cfg.tcspc);
  run.t3_idler = record_t3(run.idler, cfg.tcspc);
  if (keep_pairs) run.pairs = std::move(pairs);
  return run;
}

enum class Arm { direct_signal, direct_idler, herald_signal, herald_idler };

inline Arm parse_arm(std::string_view s) {
  if (s == "direct-signal") return Arm::direct_signal;
  if (s == "direct-idler") return Arm::direct_idler;
  if (s == "herald-signal") return Arm::herald_signal;
  if (s == "herald-idler") return Arm::herald_idler;
  throw ParameterError("arm", "expected direct-signal, direct-idler, herald-signal or herald-idler");
}

inline std::string_view arm_name(Arm a) {
  switch (a) {
    case Arm::direct_signal: return "direct-signal";
    case Arm::direct_idler: return "direct-idler";
    case Arm::herald_signal: return "herald-signal";
    case Arm::herald_idler: return "herald-idler";
  }
  return "";
}

inline bool is_herald(Arm a) { return a == Arm::herald_signal || a == Arm::herald_idler; }

/// Signal-to-idler coincidence histogram on the default lag axis.
inline CoincidenceHistogram coincidence_histogram(const TimeTagStream& signal,
                                                  const TimeTagStream& idler,
                                                  const ExperimentConfig& cfg) {
  const double half = default_lag_half_range(cfg.derived.dispersion_spread);
  return cross_correlate(signal, idler, -half, half, cfg.tcspc.bin_resolution);
}

struct ArmAnalysis {
  Arm arm = Arm::direct_signal;
  CoincidenceHistogram histogram;
  std::optional<PeakEstimate> peak;
  std::optional<HeraldWindow> window;
  std::size_t selected_count = 0;
  Waveform waveform;
  std::optional<Spectrum> spectrum;
  std::optional<ToneSnr> tone;
  std::optional<ToneFit> fit;
};

/// Window used for heralding: the given center/width, with missing values
/// taken from the coincidence peak (center = peak center, width = FWHM).
inline HeraldWindow resolve_window(const CoincidenceHistogram& h, std::optional<double> center,
                                   std::optional<double> width, std::optional<PeakEstimate>& peak) {
  if (!center || !width) {
    peak = histogram_fwhm(h);
    if (!center) center = peak->center;
    if (!width) width = peak->fwhm;
  }
  return {*center, *width};
}

inline TimeTagStream select_arm(const TimeTagStream& signal, const TimeTagStream& idler, Arm arm,
                                const std::optional<HeraldWindow>& w) {
  switch (arm) {
    case Arm::direct_signal: return signal;
    case Arm::direct_idler: return idler;
    case Arm::herald_signal: return herald(signal, idler, *w);
    case Arm::herald_idler: return herald(idler, signal, w->mirrored());
  }
  return {};
}

inline ArmAnalysis analyze_arm(const TimeTagStream& signal, const TimeTagStream& idler,
                               const ExperimentConfig& cfg, Arm arm,
                               std::optional<double> center = std::nullopt,
                               std::optional<double> width = std::nullopt) {
  ArmAnalysis a;
  a.arm = arm;
  a.histogram = coincidence_histogram(signal, idler, cfg);
  if (is_herald(arm)) {
    a.window = resolve_window(a.histogram, center, width, a.peak);
  } else {
    try {
      a.peak = histogram_fwhm(a.histogram);
    } catch (const NoPeakError&) {
    }
  }
  const TimeTagStream sel = select_arm(signal, idler, arm, a.window);
  a.selected_count = sel.size();
  a.waveform = fold_stream(sel, cfg.tcspc);
  if (a.waveform.total_events > 0) {
    a.spectrum = spectrum(a.waveform, cfg.tcspc.sampling_rate_hz(), cfg.link.rf_freq);
    a.tone = tone_snr(*a.spectrum, cfg.link.rf_freq);
    a.fit = fit_tone(a.waveform, cfg.link.rf_freq);
  }
  return a;
}

/// Window widths: "w1,w2,..." (ps) or "log:min:max:n" for n log-spaced
/// widths between min and max ps.
inline std::vector<double> parse_widths(std::string_view spec) {
  std::vector<double> out;
  auto num = [](std::string_view t) {
    try {
      std::size_t used = 0;
      const std::string s(t);
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ParameterError("widths", "not a number: '" + std::string(t) + "'");
    }
  };
  if (spec.starts_with("log:")) {
    std::vector<std::string_view> parts;
    std::string_view rest = spec.substr(4);
    for (std::size_t p; (p = rest.find(':')) != std::string_view::npos; rest = rest.substr(p + 1))
      parts.push_back(rest.substr(0, p));
    parts.push_back(rest);
    if (parts.size() != 3) throw ParameterError("widths", "expected log:min:max:n");
    const double lo = num(parts[0]), hi = num(parts[1]);
    const double nd = num(parts[2]);
    if (!(lo > 0 && hi > lo && nd >= 2 && nd == std::floor(nd)))
      throw ParameterError("widths", "log spec needs 0 < min < max and integer n >= 2");
    const auto n = static_cast<std::size_t>(nd);
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1)));
    return out;
  }
  std::string_view rest = spec;
  while (!rest.empty()) {
    const std::size_t p = rest.find(',');
    const std::string_view tok = rest.substr(0, p);
    if (!tok.empty()) out.push_back(num(tok));
    if (p == std::string_view::npos) break;
    rest = rest.substr(p + 1);
  }
  if (out.empty()) throw ParameterError("widths", "must not be empty");
  return out;
}

}  // namespace qmwp
