#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qmwp/theory.hpp"

using namespace qmwp;

namespace {
const double omega = units::angular_ps(2e9);

HeraldFactors factors(double tau, double delta, double w) {
  HeraldFactors h;
  h.window_tau = tau;
  h.walkoff_delta = delta;
  h.corr_width_w = w;
  return h;
}

PairTimingModel model_for(double gvd) {
  ExperimentConfig cfg;
  cfg.link.gvd = gvd;
  return timing_model(validate_config(cfg));
}

ClassicalCarrier carrier(double beta1, double beta2) {
  ClassicalCarrier c;
  c.pulse_width_tau_p = 2000;
  c.rf_omega = omega;
  c.beta1 = beta1;
  c.beta2 = beta2;
  c.grid = auto_grid(c.pulse_width_tau_p, omega, beta1, beta2);
  return c;
}

std::vector<double> log_taus(double lo, double hi, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return t;
}
}  // namespace

TEST(C1, Limits) {
  EXPECT_NEAR(c1_factor(factors(1e7, 16, 700)), 1.0, 1e-12);
  EXPECT_NEAR(c1_factor(factors(2 * 700, 0, 700)), 0.8427007929497149, 1e-12);
  EXPECT_NEAR(c1_factor(factors(0, 0, 700)), 0.0, 1e-15);
  for (double tau : {1.0, 50.0, 900.0}) EXPECT_EQ(c1_factor(factors(tau, 0, 300)), std::erf(tau / 600));
}

TEST(C2, Values) {
  EXPECT_NEAR(c2_factor(factors(180, 16.1, 720)), 0.012419813130614396, 1e-14);
  EXPECT_NEAR(c2_factor(factors(90, 16.1, 720)), 0.01256620168591643, 1e-14);
  EXPECT_LT(c2_factor(factors(180, 16.1, 720)), c2_factor(factors(90, 16.1, 720)));
  EXPECT_NEAR(c2_factor(factors(1e-9, 16.1, 720)), std::erf(16.1 / 1440), 1e-12);
  EXPECT_NEAR(c2_factor(factors(1e7, 16.1, 720)), 0.0, 1e-15);
}

TEST(C1C2, MonotoneAndBounded) {
  for (double delta : {0.0, 5.0, 60.0}) {
    double p1 = -1, p2 = 2;
    for (double tau : log_taus(1e-3, 1e5, 200)) {
      const auto h = factors(tau, delta, 400);
      const double a = c1_factor(h), b = c2_factor(h);
      EXPECT_GE(a, p1 - 1e-15);
      EXPECT_LE(b, p2 + 1e-15);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
      EXPECT_GE(b, 0.0);
      EXPECT_LT(b, 1.0);
      p1 = a;
      p2 = b;
    }
  }
}

TEST(HeraldFactorsFromConfig, Mapping) {
  ExperimentConfig cfg;
  cfg.link.gvd = 495;
  const auto h = herald_factors(validate_config(cfg), 180);
  EXPECT_NEAR(h.walkoff_delta, 4 * 319.7597742880444 * omega, 1e-9);
  EXPECT_NEAR(h.phase, -319.7597742880444 * omega * omega, 1e-12);
  EXPECT_NEAR(h.corr_width_w, std::hypot(0.5, 504.4971493710833) * 2 * std::numbers::sqrt2, 1e-6);
  EXPECT_FALSE(c1_regime_ok(h, omega));
}

TEST(PredictedTone, PhaseAndAmplitude) {
  auto h = factors(1e7, 0, 100);
  h.phase = 0;
  const auto s = predicted_heralded_tone(HeraldArm::signal, h, omega, 100);
  EXPECT_NEAR(s.amplitude, 1.0, 1e-12);
  EXPECT_EQ(s.phase, 0.0);
  const auto i = predicted_heralded_tone(HeraldArm::idler, h, omega, 100);
  EXPECT_NEAR(i.phase, 0.4 * std::numbers::pi, 1e-12);
}

TEST(HeraldedContrast, MatchesTwoDimensionalIntegral) {
  // Oracle: direct 2D quadrature of E[cos] over the joint Gaussian,
  // conditioned on the window.
  struct Case { double gvd; HeraldArm arm; double tau; double value; };
  const Case cases[] = {
      {0, HeraldArm::signal, 50, 0.9786770501025067},
      {0, HeraldArm::signal, 185, 0.9653716311984979},
      {0, HeraldArm::idler, 50, 0.9786811198421098},
      {0, HeraldArm::idler, 1200, 0.9650290511163887},
      {495, HeraldArm::signal, 185, 0.9650700308407452},
      {495, HeraldArm::signal, 1200, 0.9650471589383827},
      {495, HeraldArm::idler, 50, 0.9493346810829221},
      {495, HeraldArm::idler, 185, 0.7635080846504169},
      {495, HeraldArm::idler, 1200, 0.06844704581602948},
  };
  for (const auto& c : cases)
    EXPECT_NEAR(heralded_contrast(c.arm, c.tau, model_for(c.gvd)), c.value, 1e-7 * c.value)
        << c.gvd << " " << c.tau;
}

TEST(HeraldedContrast, Limits) {
  const auto m = model_for(495);
  const double sy2 = m.sigma_signal_side * m.sigma_signal_side;
  const double sz2 = m.sigma_idler_side * m.sigma_idler_side;
  const double base = std::exp(-0.5 * omega * omega * sy2 * sz2 / (sy2 + sz2));
  EXPECT_NEAR(heralded_contrast(HeraldArm::idler, 0.0, m), base, 1e-12);
  EXPECT_NEAR(heralded_contrast(HeraldArm::idler, 1e-6, m), base, 1e-9);
  // unheralded limit: idler contrast is exp(-omega^2 sz^2 / 2)
  EXPECT_NEAR(heralded_contrast(HeraldArm::idler, 1e6, m), std::exp(-0.5 * omega * omega * sz2), 1e-12);
  EXPECT_THROW(heralded_contrast(HeraldArm::idler, -1, m), ParameterError);
  PairTimingModel ideal;
  ideal.rf_omega = omega;
  EXPECT_EQ(heralded_contrast(HeraldArm::signal, 10, ideal), 1.0);
}

TEST(FigureOfMerit, IdlerOptimumBelowSignalAndStable) {
  const auto taus = log_taus(10, 5000, 300);
  std::vector<double> idler_opt;
  for (double gvd : {165.0, 495.0, 826.0}) {
    const auto m = model_for(gvd);
    const auto fs = herald_figure_of_merit(HeraldArm::signal, m, taus);
    const auto fi = herald_figure_of_merit(HeraldArm::idler, m, taus);
    EXPECT_LT(fi.argmax_tau, fs.argmax_tau);
    EXPECT_GT(fi.argmax_tau, taus.front());
    idler_opt.push_back(fi.argmax_tau);
  }
  const double mid = idler_opt[1];
  for (double t : idler_opt) EXPECT_LT(std::abs(t / mid - 1), 0.3);
}

TEST(FigureOfMerit, ZeroSigmaReducesToContrast) {
  const auto taus = log_taus(1, 1000, 50);
  const auto h = factors(1, 16.1, 720);
  const auto f = herald_figure_of_merit(HeraldArm::idler, h, 0.0, taus);
  EXPECT_EQ(f.argmax_index, 0u);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    auto hh = h;
    hh.window_tau = taus[i];
    EXPECT_DOUBLE_EQ(f.fom[i], c2_factor(hh));
  }
  EXPECT_THROW(herald_figure_of_merit(HeraldArm::idler, h, -1.0, taus), ParameterError);
  EXPECT_NEAR(heralded_count_fraction(1e9, 30), 1.0, 1e-15);
  EXPECT_NEAR(heralded_count_fraction(2 * std::numbers::sqrt2 * 30, 30), std::erf(1.0), 1e-15);
}

TEST(Classical, IdentityChannel) {
  const auto ref = classical_pulsed_waveform(carrier(0, 0));
  // (1 + cos)^2 = 3/2 + 2 cos + cos(2 x) / 2: RF amplitude of 4/3
  EXPECT_NEAR(ref.rf_amplitude, 4.0 / 3.0, 1e-6);
  EXPECT_NEAR(ref.rf_amplitude, ref.rf_reference, 1e-12);
  for (double b1 : {37.0, 250.0}) {
    const auto d = classical_pulsed_waveform(carrier(b1, 0));
    EXPECT_NEAR(d.rf_amplitude, ref.rf_amplitude, 1e-6);
    EXPECT_NEAR(std::remainder(d.rf_phase - omega * b1, 2 * std::numbers::pi), 0.0, 1e-6);
  }
}

TEST(Classical, FadingNullAndWalkoff) {
  const double null_b2 = fading_null_beta2(omega);
  EXPECT_NEAR(null_b2, 9947.183943243457, 1e-6);
  const auto n = classical_pulsed_waveform(carrier(0, null_b2));
  EXPECT_LT(n.rf_amplitude, 0.01 * n.rf_reference);
  // cos(beta2 omega^2) law well inside the walk-off limit
  const auto q = classical_pulsed_waveform(carrier(0, null_b2 / 3));
  EXPECT_NEAR(q.rf_amplitude / q.rf_reference, std::cos(std::numbers::pi / 6), 0.01);
  // second peak of |cos| where 2 beta2 omega exceeds the pulse: tone decays
  const auto w = classical_pulsed_waveform(carrier(0, 2e5));
  EXPECT_LT(w.rf_amplitude, 0.1 * w.rf_reference);
  const auto period = classical_pulsed_waveform(carrier(0, 2 * null_b2));
  EXPECT_GT(period.rf_amplitude, w.rf_amplitude);
}

TEST(Classical, ResolutionChecks) {
  auto c = carrier(0, 0);
  c.grid.dt = 20;
  EXPECT_THROW(classical_pulsed_waveform(c), ResolutionError);
  c = carrier(0, 0);
  c.grid.t_min = -3000;
  c.grid.t_max = 3000;
  EXPECT_THROW(classical_pulsed_waveform(c), ResolutionError);
  c = carrier(0, 0);
  c.pulse_width_tau_p = 0;
  EXPECT_THROW(classical_pulsed_waveform(c), ParameterError);
}

TEST(Mzm, ModulationDepth) {
  LinkParams l;
  EXPECT_NEAR(mzm_modulation_depth(l), 0.5734019761278314, 1e-10);
  l.rf_mod_index = 0;
  EXPECT_NEAR(mzm_modulation_depth(l), 0.0, 1e-12);
}
