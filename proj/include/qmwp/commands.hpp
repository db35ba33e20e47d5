#pragma once

// File-level commands behind the qmwp CLI. Each command validates its inputs
// before writing anything, and every file is written complete-then-rename.

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmwp/analysis.hpp"
#include "qmwp/config_file.hpp"
#include "qmwp/io.hpp"
#include "qmwp/params.hpp"
#include "qmwp/pipeline.hpp"
#include "qmwp/theory.hpp"

namespace qmwp {

inline constexpr std::string_view manifest_format = "qmwp-run/1";
inline constexpr std::string_view manifest_name = "manifest.json";

using json = nlohmann::ordered_json;

namespace detail {

inline json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline void write_json(const std::filesystem::path& p, const json& j) { io::atomic_write(p, j.dump(2) + "\n"); }

inline ExperimentConfig load_validated(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.source.seed = *seed;
  return validate_config(cfg);
}

}  // namespace detail

struct SimulateOptions {
  std::optional<std::uint64_t> seed;
  bool write_pairs = false;
};

/// source -> link -> detectors -> T3. Writes signal.qtt, idler.qtt,
/// signal_t3.csv, idler_t3.csv and manifest.json (optionally pairs.csv) into
/// `out_dir`; returns the manifest.
inline json cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                         const SimulateOptions& opt = {}) {
  const ExperimentConfig cfg = detail::load_validated(config_path, opt.seed);
  io::ensure_writable_dir(out_dir);

  const SimulationRun run = simulate(cfg, opt.write_pairs);
  const std::string text = to_config_text(cfg);

  json files;
  files["signal_timetags"] = "signal.qtt";
  files["idler_timetags"] = "idler.qtt";
  files["signal_t3"] = "signal_t3.csv";
  files["idler_t3"] = "idler_t3.csv";
  io::write_timetags(out_dir / "signal.qtt", run.signal);
  io::write_timetags(out_dir / "idler.qtt", run.idler);
  io::atomic_write(out_dir / "signal_t3.csv", io::t3_csv(run.t3_signal));
  io::atomic_write(out_dir / "idler_t3.csv", io::t3_csv(run.t3_idler));
  if (run.pairs) {
    io::Csv csv("id,t_signal_ps,t_idler_ps,detuning_rad_per_ps,idler_present");
    for (const auto& e : run.pairs->events)
      csv.row(e.id, e.t_signal, e.t_idler, e.detuning, e.idler_present ? 1 : 0);
    csv.save(out_dir / "pairs.csv");
    files["pairs"] = "pairs.csv";
  }

  json m;
  m["format"] = manifest_format;
  m["config_sha256"] = io::sha256_hex(text);
  m["seed"] = cfg.source.seed;
  m["files"] = files;
  m["counts"] = {{"pairs", run.pair_count},
                 {"signal", run.signal.size()},
                 {"idler", run.idler.size()},
                 {"signal_t3", run.t3_signal.records.size()},
                 {"idler_t3", run.t3_idler.records.size()}};
  m["warnings"] = cfg.warnings;
  m["config"] = text;
  detail::write_json(out_dir / manifest_name, m);
  return m;
}

/// A simulated run read back from its manifest.
struct LoadedRun {
  std::filesystem::path dir;
  json manifest;
  ExperimentConfig config;
  TimeTagStream signal;
  TimeTagStream idler;
};

inline LoadedRun load_run(const std::filesystem::path& manifest_path) {
  LoadedRun r;
  r.dir = manifest_path.parent_path();
  try {
    r.manifest = json::parse(io::read_file(manifest_path));
  } catch (const json::exception& e) {
    throw IoError("malformed manifest: " + std::string(e.what()));
  }
  const auto& m = r.manifest;
  if (!m.contains("format") || m["format"] != manifest_format)
    throw IoError("unsupported manifest format");
  const std::string text = m.at("config").get<std::string>();
  if (io::sha256_hex(text) != m.at("config_sha256").get<std::string>())
    throw IoError("manifest config hash mismatch");
  r.config = validate_config(parse_config(text));
  const auto& files = m.at("files");
  for (const char* key : {"signal_timetags", "idler_timetags"}) {
    const std::filesystem::path p = r.dir / files.at(key).get<std::string>();
    if (!std::filesystem::exists(p)) throw IoError("missing run file: " + p.string());
  }
  r.signal = io::read_timetags(r.dir / files["signal_timetags"].get<std::string>());
  r.idler = io::read_timetags(r.dir / files["idler_timetags"].get<std::string>());
  r.signal.channel_id = channel::signal;
  r.idler.channel_id = channel::idler;
  return r;
}

struct AnalyzeOptions {
  Arm arm = Arm::herald_signal;
  std::optional<double> window_center;
  std::optional<double> window_width;
  bool svg = true;
};

/// Coincidence histogram, folded waveform, spectrum and a JSON summary for
/// one arm. Files: histogram.csv, waveform.csv, spectrum.csv, summary.json.
inline json cmd_analyze(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
                        const AnalyzeOptions& opt) {
  if (opt.window_width && !(*opt.window_width > 0.0))
    throw ParameterError("window_width", "must be > 0");
  const LoadedRun run = load_run(manifest_path);
  const ArmAnalysis a =
      analyze_arm(run.signal, run.idler, run.config, opt.arm, opt.window_center, opt.window_width);
  io::ensure_writable_dir(out_dir);

  io::Csv hist("lag_ps,counts");
  std::vector<double> hx, hy;
  for (std::size_t k = 0; k < a.histogram.counts.size(); ++k) {
    hist.row(a.histogram.lag_center(k), a.histogram.counts[k]);
    hx.push_back(a.histogram.lag_center(k));
    hy.push_back(static_cast<double>(a.histogram.counts[k]));
  }
  hist.save(out_dir / "histogram.csv");

  io::Csv wave("time_ps,counts");
  std::vector<double> wx, wy;
  for (std::size_t k = 0; k < a.waveform.counts.size(); ++k) {
    wave.row(a.waveform.bin_time(k), a.waveform.counts[k]);
    wx.push_back(a.waveform.bin_time(k));
    wy.push_back(static_cast<double>(a.waveform.counts[k]));
  }
  wave.save(out_dir / "waveform.csv");

  io::Csv spec("freq_hz,power_db");
  if (a.spectrum)
    for (std::size_t k = 0; k < a.spectrum->freqs.size(); ++k)
      spec.row(a.spectrum->freqs[k], a.spectrum->power_db[k]);
  spec.save(out_dir / "spectrum.csv");

  if (opt.svg) {
    io::atomic_write(out_dir / "histogram.svg",
                     io::svg_polyline(hx, hy, "coincidence histogram", "lag (ps)", "counts"));
    io::atomic_write(out_dir / "waveform.svg",
                     io::svg_polyline(wx, wy, std::string(arm_name(a.arm)) + " waveform",
                                      "time (ps)", "counts"));
    if (a.spectrum)
      io::atomic_write(out_dir / "spectrum.svg",
                       io::svg_polyline(a.spectrum->freqs, a.spectrum->power_db,
                                        std::string(arm_name(a.arm)) + " spectrum", "frequency (Hz)",
                                        "power (dB)"));
  }

  json s;
  s["arm"] = arm_name(a.arm);
  s["tone_hz"] = run.config.link.rf_freq;
  s["selected_count"] = a.selected_count;
  if (a.window) s["window"] = {{"center_ps", a.window->center}, {"width_ps", a.window->width}};
  if (a.peak)
    s["peak"] = {{"center_ps", a.peak->center},
                 {"fwhm_ps", a.peak->fwhm},
                 {"background", a.peak->background},
                 {"peak_count", a.peak->peak_count}};
  if (a.tone && a.spectrum) {
    s["tone_detected"] = a.tone->detected;
    s["snr_db"] = detail::num_or_null(a.tone->snr_db);
    s["peak_db"] = detail::num_or_null(a.tone->peak_db);
    s["dft_noise_floor_db"] = a.spectrum->dft_noise_floor_db;
    s["actual_noise_floor_db"] = a.spectrum->actual_noise_floor_db;
    s["noise_floor_1hz_db"] = a.spectrum->noise_floor_1hz_db();
    s["n_fft"] = a.spectrum->n_fft;
    s["bin_bandwidth_hz"] = a.spectrum->bin_bandwidth;
  } else {
    s["tone_detected"] = false;
  }
  if (a.fit) s["fit"] = {{"visibility", a.fit->visibility}, {"phase_rad", a.fit->phase}};
  detail::write_json(out_dir / "summary.json", s);
  return s;
}

struct SweepOptions {
  Arm arm = Arm::herald_signal;
  std::vector<double> widths;
  std::optional<double> window_center;
  bool svg = true;
};

/// Heralding-window sweep. Files: sweep.csv (width_ps,selected_count,snr_db)
/// and sweep.json with the argmax.
inline json cmd_sweep(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
                      const SweepOptions& opt) {
  if (!is_herald(opt.arm)) throw ParameterError("arm", "sweep needs herald-signal or herald-idler");
  if (opt.widths.empty()) throw ParameterError("widths", "must not be empty");
  const LoadedRun run = load_run(manifest_path);
  const auto& cfg = run.config;
  double center = 0.0;
  std::optional<PeakEstimate> peak;
  if (opt.window_center) {
    center = *opt.window_center;
  } else {
    peak = histogram_fwhm(coincidence_histogram(run.signal, run.idler, cfg));
    center = peak->center;
  }
  const auto pts = window_sweep(run.signal, run.idler, opt.widths, cfg.tcspc,
                                cfg.tcspc.sampling_rate_hz(), cfg.link.rf_freq,
                                opt.arm == Arm::herald_signal ? HeraldArm::signal : HeraldArm::idler,
                                center);
  io::ensure_writable_dir(out_dir);
  io::Csv csv("width_ps,selected_count,snr_db");
  std::vector<double> x, y;
  for (const auto& p : pts) {
    csv.row(p.width, p.selected_count, p.snr_db);
    x.push_back(p.width);
    y.push_back(p.snr_db);
  }
  csv.save(out_dir / "sweep.csv");
  if (opt.svg)
    io::atomic_write(out_dir / "sweep.svg",
                     io::svg_polyline(x, y, std::string(arm_name(opt.arm)) + " window sweep",
                                      "window width (ps)", "SNR (dB)", true));
  const std::size_t best = sweep_argmax(pts);
  json s;
  s["arm"] = arm_name(opt.arm);
  s["center_ps"] = center;
  if (peak) s["coincidence_fwhm_ps"] = peak->fwhm;
  s["argmax_width_ps"] = pts[best].width;
  s["argmax_snr_db"] = detail::num_or_null(pts[best].snr_db);
  detail::write_json(out_dir / "sweep.json", s);
  return s;
}

struct TheoryOptions {
  std::vector<double> taus;        // ps; default log grid 10 ps .. 5 ns
  std::size_t fading_points = 61;
  bool svg = true;
};

/// Theory curves for a configuration. Files: herald.csv, classical.csv,
/// fading.csv, theory.json.
inline json cmd_theory(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                       const TheoryOptions& opt = {}) {
  const ExperimentConfig cfg = detail::load_validated(config_path, std::nullopt);
  const double omega = units::angular_ps(cfg.link.rf_freq);

  ClassicalCarrier carrier;
  carrier.pulse_width_tau_p = cfg.classical.pulse_width_tau_p;
  carrier.rf_omega = omega;
  carrier.beta1 = cfg.link.beta1;
  carrier.beta2 = cfg.derived.beta2;
  carrier.grid = auto_grid(carrier.pulse_width_tau_p, omega, carrier.beta1, carrier.beta2);
  const ClassicalWaveform cw = classical_pulsed_waveform(carrier);

  const double null_b2 = fading_null_beta2(omega);
  const double b2_max = std::max(3.0 * null_b2, 1.5 * cfg.derived.beta2);
  ClassicalCarrier fc = carrier;
  fc.beta1 = 0.0;
  fc.grid = auto_grid(fc.pulse_width_tau_p, omega, 0.0, b2_max);
  std::vector<double> fb2, famp;
  for (std::size_t i = 0; i < opt.fading_points; ++i) {
    fc.beta2 = b2_max * static_cast<double>(i) / static_cast<double>(opt.fading_points - 1);
    const auto w = classical_pulsed_waveform(fc);
    fb2.push_back(fc.beta2);
    famp.push_back(w.rf_amplitude / w.rf_reference);
  }

  std::vector<double> taus = opt.taus;
  if (taus.empty())
    for (int i = 0; i < 200; ++i) taus.push_back(10.0 * std::pow(500.0, i / 199.0));
  const PairTimingModel model = timing_model(cfg);
  const FomCurve fs_sig = herald_figure_of_merit(HeraldArm::signal, model, taus);
  const FomCurve fs_idl = herald_figure_of_merit(HeraldArm::idler, model, taus);
  const HeraldFactors h0 = herald_factors(cfg, taus.front());

  io::ensure_writable_dir(out_dir);
  io::Csv herald_csv("tau_ps,c1,c2,fom_signal,fom_idler,contrast_signal,contrast_idler");
  std::vector<double> c1v, c2v;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    HeraldFactors h = h0;
    h.window_tau = taus[i];
    c1v.push_back(c1_factor(h));
    c2v.push_back(c2_factor(h));
    herald_csv.row(taus[i], c1v.back(), c2v.back(), fs_sig.fom[i], fs_idl.fom[i],
                   heralded_contrast(HeraldArm::signal, taus[i], model),
                   heralded_contrast(HeraldArm::idler, taus[i], model));
  }
  herald_csv.save(out_dir / "herald.csv");

  io::Csv cl("time_ps,intensity");
  for (std::size_t i = 0; i < cw.times.size(); ++i) cl.row(cw.times[i], cw.intensity[i]);
  cl.save(out_dir / "classical.csv");

  io::Csv fd("beta2_ps2,rf_amplitude_rel");
  for (std::size_t i = 0; i < fb2.size(); ++i) fd.row(fb2[i], famp[i]);
  fd.save(out_dir / "fading.csv");

  if (opt.svg) {
    io::atomic_write(out_dir / "herald_fom.svg",
                     io::svg_polyline(taus, fs_idl.fom, "idler-arm figure of merit",
                                      "window width (ps)", "fom", true));
    io::atomic_write(out_dir / "classical.svg",
                     io::svg_polyline(cw.times, cw.intensity, "dispersed classical pulse",
                                      "time (ps)", "intensity"));
    io::atomic_write(out_dir / "fading.svg",
                     io::svg_polyline(fb2, famp, "classical RF fading", "beta2 (ps^2)",
                                      "relative rf amplitude"));
  }

  json s;
  s["beta2_ps2"] = cfg.derived.beta2;
  s["classical"] = {{"rf_amplitude", cw.rf_amplitude},
                    {"rf_reference", cw.rf_reference},
                    {"rf_amplitude_rel", cw.rf_amplitude / cw.rf_reference},
                    {"rf_phase_rad", cw.rf_phase},
                    {"fading_null_beta2_ps2", null_b2}};
  s["herald"] = {{"corr_width_w_ps", h0.corr_width_w},
                 {"walkoff_delta_ps", h0.walkoff_delta},
                 {"phase_rad", h0.phase},
                 {"c1_regime_ok", c1_regime_ok(h0, omega)},
                 {"fom_argmax_signal_ps", fs_sig.argmax_tau},
                 {"fom_argmax_idler_ps", fs_idl.argmax_tau}};
  detail::write_json(out_dir / "theory.json", s);
  return s;
}

}  // namespace qmwp
