#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qmwp/correlator.hpp"

using namespace qmwp;

namespace {
std::vector<double> random_times(std::size_t n, double span, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0, span);
  std::vector<double> t(n);
  for (auto& x : t) x = u(g);
  std::sort(t.begin(), t.end());
  return t;
}

TimeTagStream stream(std::vector<double> t) {
  TimeTagStream s;
  s.times = std::move(t);
  s.is_dark.assign(s.times.size(), 0);
  return s;
}
}  // namespace

TEST(CrossCorrelate, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = random_times(300, 1e5, seed);
    const auto b = random_times(400, 1e5, seed + 100);
    const auto h = cross_correlate(a, b, -2000, 2000, 16);
    std::vector<std::int64_t> ref(h.counts.size(), 0);
    for (double x : a)
      for (double y : b) {
        const double lag = y - x;
        if (lag >= -2000 && lag < 2000) ++ref[static_cast<std::size_t>(std::floor((lag + 2000) / 16))];
      }
    EXPECT_EQ(h.counts, ref);
  }
}

TEST(CrossCorrelate, Contracts) {
  const std::vector<double> a{3, 1};
  const std::vector<double> b{1, 2};
  EXPECT_THROW(cross_correlate(a, b, -1, 1, 1), ContractError);
  EXPECT_THROW(cross_correlate(b, b, -1, 1, 0), ParameterError);
  EXPECT_THROW(cross_correlate(b, b, 1, -1, 1), ParameterError);
  const auto e = cross_correlate(std::vector<double>{}, b, -1, 1, 0.5);
  EXPECT_EQ(e.counts.size(), 4u);
  EXPECT_EQ(e.total_pairs_scanned, 0);
}

TEST(CrossCorrelate, AccidentalsAreFlat) {
  // Independent Poisson streams: each bin ~ Poisson(r_a r_b T dt)
  const double span = 1e10;
  const auto a = random_times(300000, span, 7);
  const auto b = random_times(300000, span, 8);
  const auto h = cross_correlate(a, b, -5000, 5000, 8);
  const double expect = 3e5 * 3e5 / span * 8;
  for (auto c : h.counts) EXPECT_NEAR(static_cast<double>(c), expect, 5 * std::sqrt(expect));
}

TEST(HistogramFwhm, GaussianPeak) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> jit(250.0, 30.0);
  std::vector<double> a, b;
  for (int i = 0; i < 200000; ++i) {
    a.push_back(i * 1e5);
    b.push_back(i * 1e5 + jit(g));
  }
  std::sort(b.begin(), b.end());
  const auto h = cross_correlate(a, b, -5000, 5000, 4);
  const auto p = histogram_fwhm(h);
  EXPECT_NEAR(p.center, 250.0, 1.0);
  EXPECT_NEAR(p.fwhm, sigma_to_fwhm(30.0), 3.0);
}

TEST(HistogramFwhm, NoPeak) {
  CoincidenceHistogram h;
  h.bin_width = 1;
  h.lag_min = 0;
  h.lag_max = 10;
  h.counts.assign(10, 5);
  EXPECT_THROW(histogram_fwhm(h), NoPeakError);
  h.counts.clear();
  EXPECT_THROW(histogram_fwhm(h), NoPeakError);
}

TEST(Herald, SubsetAndMonotoneInWidth) {
  const auto a = stream(random_times(5000, 1e7, 1));
  const auto b = stream(random_times(5000, 1e7, 2));
  std::size_t prev = 0;
  std::vector<double> prev_sel;
  for (double w : {10.0, 100.0, 500.0, 2000.0, 8000.0}) {
    const auto s = herald(a, b, {0.0, w});
    EXPECT_GE(s.size(), prev);
    EXPECT_TRUE(std::includes(a.times.begin(), a.times.end(), s.times.begin(), s.times.end()));
    EXPECT_TRUE(std::includes(s.times.begin(), s.times.end(), prev_sel.begin(), prev_sel.end()));
    prev = s.size();
    prev_sel = s.times;
  }
}

TEST(Herald, WindowEdgesAndSingleSelection) {
  const auto a = stream({100.0, 200.0});
  const auto b = stream({140.0, 150.0, 160.0, 260.0});
  auto s = herald(a, b, {50.0, 20.0});
  EXPECT_EQ(s.times, (std::vector<double>{100.0, 200.0}));
  s = herald(a, b, {50.0, 19.0});
  EXPECT_EQ(s.times, (std::vector<double>{100.0}));
  s = herald(a, b, {-500.0, 10.0});
  EXPECT_TRUE(s.empty());
  // mirrored window selects the partner side
  s = herald(b, a, HeraldWindow{50.0, 20.0}.mirrored());
  EXPECT_EQ(s.times, b.times);
  s = herald(b, a, HeraldWindow{40.0, 10.0}.mirrored());
  EXPECT_EQ(s.times, (std::vector<double>{140.0}));
  EXPECT_THROW(herald(a, b, {0.0, 0.0}), ParameterError);
}

TEST(Herald, DefaultLagRange) {
  EXPECT_EQ(default_lag_half_range(0), 5000.0);
  EXPECT_EQ(default_lag_half_range(2000), 8000.0);
}
