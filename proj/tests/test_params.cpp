#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "qmwp/params.hpp"

using namespace qmwp;

TEST(Units, Beta2FromGvd) {
  // gvd * lambda^2 / (4 pi c), evaluated independently
  EXPECT_NEAR(gvd_to_beta2(495, 1560), 319.7597742880444, 1e-9);
  EXPECT_NEAR(gvd_to_beta2(826, 1560), 533.5789364887368, 1e-9);
  EXPECT_NEAR(gvd_to_beta2(165, 1560), 106.58659142934815, 1e-9);
  EXPECT_EQ(gvd_to_beta2(0, 1560), 0.0);
  EXPECT_THROW(gvd_to_beta2(10, 0), ParameterError);
}

TEST(Units, GaussianWidths) {
  EXPECT_NEAR(fwhm_to_sigma(50), 21.233045007200477, 1e-9);
  EXPECT_NEAR(fwhm_to_sigma(70), 29.726263010080668, 1e-9);
  EXPECT_THROW(fwhm_to_sigma(-1), ParameterError);
  for (double s : {0.0, 0.3, 1.0, 17.5, 1e4}) EXPECT_NEAR(fwhm_to_sigma(sigma_to_fwhm(s)), s, 1e-12 * (1 + s));
}

TEST(Units, CoincidenceWidth) {
  EXPECT_NEAR(predicted_coincidence_fwhm(50, 50, 1), std::sqrt(5000 + 2 * std::numbers::ln2), 1e-12);
  EXPECT_NEAR(predicted_coincidence_fwhm(50, 50, 1), 70.7205, 1e-4);
  EXPECT_EQ(predicted_coincidence_fwhm(0, 0, 0), 0.0);
  EXPECT_NEAR(predicted_coincidence_fwhm(30, 40, 0), 50.0, 1e-12);
  EXPECT_THROW(predicted_coincidence_fwhm(-1, 0, 1), ParameterError);
}

TEST(Units, SpectralWidth) {
  EXPECT_NEAR(wavelength_fwhm_to_sigma_omega(2.4, 1560), 0.7888690040740157, 1e-12);
  EXPECT_NEAR(units::angular_ps(2e9), 4 * std::numbers::pi * 1e-3, 1e-15);
}

TEST(Validate, DefaultsAreValidAndDerived) {
  ExperimentConfig cfg;
  cfg.link.gvd = 495;
  const auto v = validate_config(cfg);
  EXPECT_NEAR(v.derived.beta2, 319.7597742880444, 1e-9);
  EXPECT_EQ(v.link.beta2, v.derived.beta2);
  EXPECT_EQ(v.derived.bins_per_period, 12500);
  EXPECT_NEAR(v.derived.sigma_delta, 0.5, 1e-15);
  EXPECT_NEAR(v.derived.dispersion_spread, 504.4971493710833, 1e-8);
  EXPECT_TRUE(v.warnings.empty());
}

TEST(Validate, CollectsAllViolationsByName) {
  ExperimentConfig cfg;
  cfg.detector_signal.efficiency = 1.5;
  cfg.source.corr_width_tau_c = 0;
  cfg.tcspc.bin_resolution = 7;
  try {
    validate_config(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("detector_signal.efficiency"), std::string::npos);
    EXPECT_NE(msg.find("source.corr_width_tau_c"), std::string::npos);
    EXPECT_NE(msg.find("tcspc.sync_period"), std::string::npos);
  }
}

TEST(Validate, RejectsNonFinite) {
  ExperimentConfig cfg;
  cfg.link.rf_freq = std::nan("");
  EXPECT_THROW(validate_config(cfg), ConfigError);
  cfg = {};
  cfg.link.gvd = -1;
  EXPECT_THROW(validate_config(cfg), ConfigError);
}

TEST(Validate, Warnings) {
  ExperimentConfig cfg;
  cfg.link.rf_mod_index = 4.0;
  cfg.link.rf_freq = 2.001e9;
  cfg.tcspc.measurement_time = 0.5;
  const auto v = validate_config(cfg);
  EXPECT_EQ(v.warnings.size(), 3u);
}
