#pragma once

// Two-channel coincidence analysis: cross-correlation histograms, peak
// location and window-based heralding. All sweeps are two-pointer passes over
// sorted streams; nothing is O(n * m).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmwp/errors.hpp"
#include "qmwp/link.hpp"

namespace qmwp {

struct CoincidenceHistogram {
  double bin_width = 0.0;  // ps
  double lag_min = 0.0;    // ps, inclusive
  double lag_max = 0.0;    // ps, exclusive
  std::vector<std::int64_t> counts;
  std::int64_t total_pairs_scanned = 0;

  double lag_center(std::size_t k) const {
    return lag_min + (static_cast<double>(k) + 0.5) * bin_width;
  }
  std::size_t bin_of(double lag) const {
    return static_cast<std::size_t>(std::floor((lag - lag_min) / bin_width));
  }
};

/// Coincidence window on the lag t_b - t_a.
struct HeraldWindow {
  double center = 0.0;  // ps
  double width = 0.0;   // ps, full width

  /// Same window seen from the other channel (lag t_a - t_b).
  HeraldWindow mirrored() const { return {-center, width}; }
};

struct PeakEstimate {
  double center = 0.0;  // ps
  double fwhm = 0.0;    // ps
  double background = 0.0;
  std::int64_t peak_count = 0;
};

inline void require_sorted(std::span<const double> t, const char* name) {
  if (!std::is_sorted(t.begin(), t.end()))
    throw ContractError(std::string(name) + " is not sorted by time");
}

/// Histogram of t_b[j] - t_a[i] over [lag_min, lag_max).
inline CoincidenceHistogram cross_correlate(std::span<const double> a, std::span<const double> b,
                                            double lag_min, double lag_max, double bin_width) {
  if (!(bin_width > 0.0)) throw ParameterError("bin_width", "must be > 0");
  if (!(std::isfinite(lag_min) && std::isfinite(lag_max) && lag_max > lag_min))
    throw ParameterError("lag_range", "must be finite with max > min");
  require_sorted(a, "stream a");
  require_sorted(b, "stream b");

  CoincidenceHistogram h;
  h.bin_width = bin_width;
  h.lag_min = lag_min;
  h.lag_max = lag_max;
  const auto nbins = static_cast<std::size_t>(std::llround((lag_max - lag_min) / bin_width));
  h.counts.assign(nbins, 0);

  std::size_t j0 = 0;
  for (double ta : a) {
    const double lo = ta + lag_min;
    const double hi = ta + lag_max;
    while (j0 < b.size() && b[j0] < lo) ++j0;
    for (std::size_t j = j0; j < b.size() && b[j] < hi; ++j) {
      const std::size_t k = h.bin_of(b[j] - ta);
      if (k < nbins) {
        ++h.counts[k];
        ++h.total_pairs_scanned;
      }
    }
  }
  return h;
}

inline CoincidenceHistogram cross_correlate(const TimeTagStream& a, const TimeTagStream& b,
                                            double lag_min, double lag_max, double bin_width) {
  return cross_correlate(std::span<const double>(a.times), std::span<const double>(b.times),
                         lag_min, lag_max, bin_width);
}

/// Default half range of the lag axis: 5 ns, widened to four times the
/// dispersion-induced delay spread when that is larger.
inline double default_lag_half_range(double dispersion_spread_ps) {
  return std::max(5000.0, 4.0 * dispersion_spread_ps);
}

/// Locates the coincidence peak. The background is the median bin count;
/// the width is read off by linear interpolation at half maximum above it
/// and the center is the midpoint of the two half-maximum crossings.
inline PeakEstimate histogram_fwhm(const CoincidenceHistogram& h) {
  const auto& c = h.counts;
  if (c.empty()) throw NoPeakError("empty histogram");

  std::vector<std::int64_t> sorted = c;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  double bg = static_cast<double>(sorted[mid]);
  if (sorted.size() % 2 == 0) {
    const auto lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    bg = 0.5 * (bg + static_cast<double>(lower));
  }

  const auto peak_it = std::max_element(c.begin(), c.end());
  const auto peak = static_cast<std::size_t>(peak_it - c.begin());
  const double top = static_cast<double>(*peak_it);
  if (!(top > 2.0 * bg) || top <= 0.0)
    throw NoPeakError("no histogram bin exceeds twice the background");

  const double half = bg + 0.5 * (top - bg);
  auto val = [&](std::size_t k) { return static_cast<double>(c[k]); };

  std::size_t left = peak;
  while (left > 0 && val(left - 1) > half) --left;
  std::size_t right = peak;
  while (right + 1 < c.size() && val(right + 1) > half) ++right;

  double x_left = h.lag_center(left) - 0.5 * h.bin_width;
  if (left > 0) {
    const double y0 = val(left - 1), y1 = val(left);
    x_left = h.lag_center(left - 1) + (half - y0) / (y1 - y0) * h.bin_width;
  }
  double x_right = h.lag_center(right) + 0.5 * h.bin_width;
  if (right + 1 < c.size()) {
    const double y0 = val(right), y1 = val(right + 1);
    x_right = h.lag_center(right) + (y0 - half) / (y0 - y1) * h.bin_width;
  }

  PeakEstimate p;
  p.center = 0.5 * (x_left + x_right);
  p.fwhm = x_right - x_left;
  p.background = bg;
  p.peak_count = *peak_it;
  return p;
}

/// Events of `a` that have at least one partner in `b` with
/// |t_b - t_a - center| <= width / 2. Each a-event is selected at most once;
/// the result is a sorted sub-sequence of `a`.
inline TimeTagStream herald(const TimeTagStream& a, const TimeTagStream& b, const HeraldWindow& w) {
  if (!(w.width > 0.0)) throw ParameterError("width", "must be > 0");
  require_sorted(a.times, "heralded stream");
  require_sorted(b.times, "heralding stream");

  TimeTagStream out;
  out.channel_id = a.channel_id;
  const double half = 0.5 * w.width;
  std::size_t j = 0;
  const auto& tb = b.times;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double lo = a.times[i] + w.center - half;
    const double hi = a.times[i] + w.center + half;
    while (j < tb.size() && tb[j] < lo) ++j;
    if (j < tb.size() && tb[j] <= hi) {
      out.times.push_back(a.times[i]);
      out.is_dark.push_back(i < a.is_dark.size() ? a.is_dark[i] : 0);
    }
  }
  return out;
}

}  // namespace qmwp
