#include <string>

#include <gtest/gtest.h>

#include "qmwp/config_file.hpp"

using namespace qmwp;

TEST(ConfigFile, ParsesSectionsAndKeepsDefaults) {
  const auto c = parse_config(
      "# comment\n[source]\npair_rate = 2.5e5\nseed = 42\n[link]\ngvd = 495\n"
      "modulate_after_dispersion = true\n[detector_idler]\njitter_fwhm = 30\n");
  EXPECT_EQ(c.source.pair_rate, 2.5e5);
  EXPECT_EQ(c.source.seed, 42u);
  EXPECT_EQ(c.link.gvd, 495);
  EXPECT_TRUE(c.link.modulate_after_dispersion);
  EXPECT_EQ(c.detector_idler.jitter_fwhm, 30);
  EXPECT_EQ(c.detector_signal.jitter_fwhm, 50);
  EXPECT_EQ(c.tcspc.bin_resolution, 8);
}

TEST(ConfigFile, RejectsUnknownAndMalformed) {
  EXPECT_THROW(parse_config("[source]\npair_rte = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[nosuch]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[source]\npair_rate = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("[source]\nseed = -3\n"), ConfigError);
  EXPECT_THROW(parse_config("[link]\nmodulate_after_dispersion = maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("pair_rate = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[source\npair_rate = 1\n"), ConfigError);
}

TEST(ConfigFile, TextRoundTrip) {
  ExperimentConfig c;
  c.source.pair_rate = 123456.789;
  c.source.seed = 99;
  c.link.mzm_bias_phase = 1.2345678901234567;
  c.link.gvd = 826;
  c.detector_signal.dark_rate = 0.1;
  c.classical.pulse_width_tau_p = 1500;
  const std::string text = to_config_text(c);
  const auto r = parse_config(text);
  EXPECT_EQ(r.source.pair_rate, c.source.pair_rate);
  EXPECT_EQ(r.source.seed, c.source.seed);
  EXPECT_EQ(r.link.mzm_bias_phase, c.link.mzm_bias_phase);
  EXPECT_EQ(r.link.gvd, c.link.gvd);
  EXPECT_EQ(r.detector_signal.dark_rate, c.detector_signal.dark_rate);
  EXPECT_EQ(r.classical.pulse_width_tau_p, c.classical.pulse_width_tau_p);
  EXPECT_EQ(to_config_text(r), text);
}

TEST(ConfigFile, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/dir/x.ini"), IoError);
}
