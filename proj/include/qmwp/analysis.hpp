#pragma once

// Waveform folding, DFT power spectra with noise-floor bookkeeping, tone SNR,
// SFDR extrapolation and heralding-window sweeps.
//
// Noise-floor conventions:
//   dft floor     median of the per-bin power (dB) away from DC and from the
//                 first four harmonics of the declared tone (+-2 bins each)
//   actual floor  dft floor + 10 log10(n_fft / 2)
//   1 Hz floor    dft floor - 10 log10(bin bandwidth)
//   SNR           tone peak (3 nearest bins) - actual floor

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qmwp/correlator.hpp"
#include "qmwp/errors.hpp"
#include "qmwp/fft.hpp"
#include "qmwp/link.hpp"
#include "qmwp/params.hpp"

namespace qmwp {

struct Waveform {
  double bin_width = 0.0;  // ps
  std::vector<std::int64_t> counts;
  std::int64_t total_events = 0;

  double bin_time(std::size_t k) const { return (static_cast<double>(k) + 0.5) * bin_width; }
};

struct Spectrum {
  std::vector<double> freqs;     // Hz, k * bin_bandwidth for k = 0 .. n_fft/2
  std::vector<double> power;     // |X_k|^2
  std::vector<double> power_db;  // 10 log10 |X_k|^2
  std::size_t n_fft = 0;
  std::size_t record_length = 0;
  double bin_bandwidth = 0.0;  // Hz
  double dft_noise_floor_db = 0.0;
  double actual_noise_floor_db = 0.0;
  std::optional<double> declared_tone_hz;

  double sampling_rate() const { return bin_bandwidth * static_cast<double>(n_fft); }
  /// Correction from the DFT floor to the actual floor, 10 log10(n_fft / 2).
  double floor_correction_db() const { return 10.0 * std::log10(static_cast<double>(n_fft) / 2.0); }
  /// Offset from the DFT floor to the 1 Hz-normalised noise density.
  double one_hz_offset_db() const { return 10.0 * std::log10(bin_bandwidth); }
  double noise_floor_1hz_db() const { return dft_noise_floor_db - one_hz_offset_db(); }
};

struct ToneSnr {
  double snr_db = 0.0;
  double peak_db = 0.0;
  double peak_freq = 0.0;
  bool detected = false;  // peak above the actual noise floor
};

struct ToneFit {
  double mean = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;  // rad, counts ~ mean + amplitude cos(omega t + phase)
  double visibility = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double x) const { return slope * x + intercept; }
};

struct SfdrPoint {
  double rf_power_in = 0.0;      // dB
  double fundamental_out = 0.0;  // dB
  double hd2_out = 0.0;          // dB
};

struct SfdrResult {
  LineFit fundamental_fit;
  LineFit hd2_fit;
  double noise_floor_1hz_db = 0.0;
  double crossing_input_db = 0.0;
  double sfdr2_db_hz_half = 0.0;
};

enum class HeraldArm { signal, idler };

struct SweepPoint {
  double width = 0.0;  // ps
  std::int64_t selected_count = 0;
  double snr_db = 0.0;
  bool detected = false;
};

inline Waveform fold_waveform(const T3Stream& records) {
  if (records.bins_per_period <= 0) throw ParameterError("bins_per_period", "must be > 0");
  Waveform w;
  w.bin_width = records.bin_resolution;
  w.counts.assign(static_cast<std::size_t>(records.bins_per_period), 0);
  for (const auto& r : records.records) {
    if (r.dtime_bin < 0 || r.dtime_bin >= records.bins_per_period)
      throw RecordError("dtime_bin out of range");
    ++w.counts[static_cast<std::size_t>(r.dtime_bin)];
  }
  w.total_events = static_cast<std::int64_t>(records.records.size());
  return w;
}

inline Waveform fold_waveform(const T3Stream& records, const TcspcParams& tc) {
  if (records.bins_per_period != tc.bins_per_period())
    throw ContractError("T3 stream was not recorded with these TCSPC parameters");
  return fold_waveform(records);
}

namespace detail {

inline double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

}  // namespace detail

/// Power spectrum of a sampled record. The record is mean-removed and
/// zero-padded to the next power of two before the DFT.
inline Spectrum spectrum(std::span<const double> samples, double fs,
                         std::optional<double> tone_hz = std::nullopt) {
  if (samples.empty()) throw DegenerateInputError("empty waveform");
  if (!(fs > 0.0)) throw ParameterError("fs", "must be > 0");

  const std::size_t len = samples.size();
  const std::size_t n = fft::next_pow2(len);
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(len);

  std::vector<double> padded(n, 0.0);
  double energy = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    padded[i] = samples[i] - mean;
    energy += padded[i] * padded[i];
  }
  if (!(energy > 0.0)) throw DegenerateInputError("waveform has no variation");

  const auto coeffs = fft::rfft(padded);
  Spectrum s;
  s.n_fft = n;
  s.record_length = len;
  s.bin_bandwidth = fs / static_cast<double>(n);
  s.declared_tone_hz = tone_hz;
  s.freqs.resize(coeffs.size());
  s.power.resize(coeffs.size());
  s.power_db.resize(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    s.freqs[k] = static_cast<double>(k) * s.bin_bandwidth;
    s.power[k] = std::norm(coeffs[k]);
    s.power_db[k] = 10.0 * std::log10(std::max(s.power[k], 1e-300));
  }

  std::vector<bool> excluded(coeffs.size(), false);
  auto exclude_around = [&](long centre) {
    for (long k = centre - 2; k <= centre + 2; ++k)
      if (k >= 0 && k < static_cast<long>(excluded.size())) excluded[static_cast<std::size_t>(k)] = true;
  };
  exclude_around(0);
  if (tone_hz) {
    for (int h = 1; h <= 4; ++h) exclude_around(std::lround(h * *tone_hz / s.bin_bandwidth));
  }
  std::vector<double> pool;
  pool.reserve(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (!excluded[k]) pool.push_back(s.power_db[k]);
  if (pool.empty()) throw DegenerateInputError("no bins left for the noise floor");
  s.dft_noise_floor_db = detail::median_of(std::move(pool));
  s.actual_noise_floor_db = s.dft_noise_floor_db + s.floor_correction_db();
  return s;
}

inline Spectrum spectrum(const Waveform& w, double fs, std::optional<double> tone_hz = std::nullopt) {
  if (w.counts.empty()) throw DegenerateInputError("empty waveform");
  if (w.total_events == 0) throw DegenerateInputError("waveform has no events");
  std::vector<double> samples(w.counts.begin(), w.counts.end());
  return spectrum(samples, fs, tone_hz);
}

/// (1 / n_fft) * sum over all n_fft DFT bins of |X_k|^2, reconstructed from
/// the one-sided spectrum. Equals the sum of squared (mean-removed) samples.
inline double parseval_energy(const Spectrum& s) {
  double sum = 0.0;
  const std::size_t last = s.power.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const bool edge = k == 0 || (k == last && s.n_fft % 2 == 0);
    sum += (edge ? 1.0 : 2.0) * s.power[k];
  }
  return sum / static_cast<double>(s.n_fft);
}

inline ToneSnr tone_snr(const Spectrum& s, double f_hz) {
  const double fs = s.sampling_rate();
  if (!(f_hz >= 0.0 && f_hz < fs / 2.0)) throw ParameterError("f", "must be within [0, fs/2)");
  const long centre = std::lround(f_hz / s.bin_bandwidth);
  ToneSnr r;
  r.peak_db = -std::numeric_limits<double>::infinity();
  for (long k = centre - 1; k <= centre + 1; ++k) {
    if (k < 0 || k >= static_cast<long>(s.power_db.size())) continue;
    if (s.power_db[static_cast<std::size_t>(k)] > r.peak_db) {
      r.peak_db = s.power_db[static_cast<std::size_t>(k)];
      r.peak_freq = s.freqs[static_cast<std::size_t>(k)];
    }
  }
  r.snr_db = r.peak_db - s.actual_noise_floor_db;
  r.detected = r.snr_db > 0.0;
  return r;
}

/// Least-squares fit of counts(t) = A + B cos(omega t) + C sin(omega t) at
/// bin centres; chi2 uses Poisson variances from the fitted model.
inline ToneFit fit_tone(const Waveform& w, double f_hz) {
  if (w.counts.size() < 4) throw DegenerateInputError("waveform too short for a tone fit");
  const double omega = units::angular_ps(f_hz);
  const auto n = static_cast<Eigen::Index>(w.counts.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = w.bin_time(static_cast<std::size_t>(k));
    X(k, 0) = 1.0;
    X(k, 1) = std::cos(omega * t);
    X(k, 2) = std::sin(omega * t);
    y(k) = static_cast<double>(w.counts[static_cast<std::size_t>(k)]);
  }
  const Eigen::Vector3d beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  ToneFit fit;
  fit.mean = beta(0);
  fit.amplitude = std::hypot(beta(1), beta(2));
  fit.phase = std::atan2(-beta(2), beta(1));
  fit.visibility = fit.mean > 0.0 ? fit.amplitude / fit.mean : 0.0;
  const Eigen::VectorXd model = X * beta;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double var = std::max(model(k), 1.0);
    fit.chi2 += (y(k) - model(k)) * (y(k) - model(k)) / var;
  }
  fit.dof = static_cast<std::size_t>(n) - 3;
  return fit;
}

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-12 * std::max(1.0, mx * mx))) throw FitError("degenerate regression: inputs identical");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

/// Second-order spur-free dynamic range. Fits the fundamental and HD2 output
/// powers against input power, finds the input at which the HD2 line meets
/// the 1 Hz noise floor and returns the fundamental's height above the floor
/// there.
inline SfdrResult sfdr_fit(std::span<const SfdrPoint> points, double noise_floor_1hz_db) {
  if (points.size() < 3) throw ParameterError("points", "need at least 3 measurements");
  std::vector<double> pin, fund, hd2;
  for (const auto& p : points) {
    pin.push_back(p.rf_power_in);
    fund.push_back(p.fundamental_out);
    hd2.push_back(p.hd2_out);
  }
  SfdrResult r;
  r.fundamental_fit = fit_line(pin, fund);
  r.hd2_fit = fit_line(pin, hd2);
  r.noise_floor_1hz_db = noise_floor_1hz_db;
  if (r.hd2_fit.slope == 0.0) throw FitError("HD2 line never crosses the noise floor");
  r.crossing_input_db = (noise_floor_1hz_db - r.hd2_fit.intercept) / r.hd2_fit.slope;
  if (!(std::abs(r.crossing_input_db) <= 200.0))
    throw FitError("HD2 line does not cross the noise floor within +-200 dB input");
  r.sfdr2_db_hz_half = r.fundamental_fit(r.crossing_input_db) - noise_floor_1hz_db;
  return r;
}

/// Waveform of a time-tag stream folded on the sync grid.
inline Waveform fold_stream(const TimeTagStream& s, const TcspcParams& tc) {
  return fold_waveform(record_t3(s, tc), tc);
}

/// Herald -> fold -> spectrum -> SNR for each window width. The heralded
/// arm is selected against the other; `center` is the signal-to-idler lag
/// (t_idler - t_signal) of the coincidence peak.
inline std::vector<SweepPoint> window_sweep(const TimeTagStream& signal, const TimeTagStream& idler,
                                            std::span<const double> widths, const TcspcParams& tc,
                                            double fs, double f_rf, HeraldArm arm, double center) {
  if (widths.empty()) throw ParameterError("widths", "must not be empty");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!(widths[i] > 0.0)) throw ParameterError("widths", "must be positive");
    if (i > 0 && widths[i] < widths[i - 1]) throw ParameterError("widths", "must be sorted");
  }
  std::vector<SweepPoint> out;
  out.reserve(widths.size());
  for (double width : widths) {
    const HeraldWindow w{center, width};
    const TimeTagStream sel =
        arm == HeraldArm::signal ? herald(signal, idler, w) : herald(idler, signal, w.mirrored());
    SweepPoint p;
    p.width = width;
    p.selected_count = static_cast<std::int64_t>(sel.size());
    const Waveform wf = fold_stream(sel, tc);
    if (wf.total_events > 0) {
      const ToneSnr snr = tone_snr(spectrum(wf, fs, f_rf), f_rf);
      p.snr_db = snr.snr_db;
      p.detected = snr.detected;
    } else {
      p.snr_db = -std::numeric_limits<double>::infinity();
    }
    out.push_back(p);
  }
  return out;
}

inline std::size_t sweep_argmax(std::span<const SweepPoint> sweep) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (sweep[i].snr_db > sweep[best].snr_db) best = i;
  return best;
}

}  // namespace qmwp
