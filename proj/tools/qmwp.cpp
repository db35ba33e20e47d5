// qmwp: simulate, analyze, sweep and theory subcommands.
//
// Exit codes: 0 ok, 2 config/parameter error, 3 IO error, 4 analysis error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qmwp/qmwp.hpp"

namespace {

int report(int code, const std::exception& e) {
  std::cerr << "qmwp: " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum microwave photonics link simulator"};
  app.require_subcommand(1);

  std::string config, out = ".", manifest, arm_text = "herald-signal", widths_text;
  std::optional<double> center, width;
  std::optional<std::uint64_t> seed;
  bool write_pairs = false, no_svg = false;

  auto* sim = app.add_subcommand("simulate", "run source -> link -> detectors -> TCSPC");
  sim->add_option("--config", config, "experiment config (INI)")->required();
  sim->add_option("--out", out, "output directory");
  sim->add_option("--seed", seed, "override source.seed");
  sim->add_flag("--write-pairs", write_pairs, "also write pairs.csv");

  auto* ana = app.add_subcommand("analyze", "histogram, waveform and spectrum of one arm");
  ana->add_option("--manifest", manifest, "manifest.json of a simulate run")->required();
  ana->add_option("--out", out, "output directory");
  ana->add_option("--arm", arm_text, "direct-signal|direct-idler|herald-signal|herald-idler");
  ana->add_option("--window-center", center, "herald window center (ps, t_idler - t_signal)");
  ana->add_option("--window-width", width, "herald window full width (ps)");

  auto* swp = app.add_subcommand("sweep", "SNR versus heralding-window width");
  swp->add_option("--manifest", manifest, "manifest.json of a simulate run")->required();
  swp->add_option("--out", out, "output directory");
  swp->add_option("--arm", arm_text, "herald-signal|herald-idler");
  swp->add_option("--widths", widths_text, "w1,w2,... or log:min:max:n (ps)")->required();
  swp->add_option("--window-center", center, "herald window center (ps)");

  auto* thy = app.add_subcommand("theory", "classical fading and heralded-contrast curves");
  thy->add_option("--config", config, "experiment config (INI)")->required();
  thy->add_option("--out", out, "output directory");

  for (auto* sc : {sim, ana, swp, thy}) sc->add_flag("--no-svg", no_svg, "skip SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      const auto m = qmwp::cmd_simulate(config, out, {seed, write_pairs});
      for (const auto& w : m["warnings"]) std::cerr << "qmwp: warning: " << w.get<std::string>() << "\n";
      std::cout << fmt::format("pairs {} signal {} idler {}\n", m["counts"]["pairs"].get<std::size_t>(),
                               m["counts"]["signal"].get<std::size_t>(),
                               m["counts"]["idler"].get<std::size_t>());
    } else if (*ana) {
      const auto s = qmwp::cmd_analyze(manifest, out, {qmwp::parse_arm(arm_text), center, width, !no_svg});
      std::cout << s.dump(2) << "\n";
    } else if (*swp) {
      const auto s = qmwp::cmd_sweep(
          manifest, out, {qmwp::parse_arm(arm_text), qmwp::parse_widths(widths_text), center, !no_svg});
      std::cout << s.dump(2) << "\n";
    } else if (*thy) {
      qmwp::TheoryOptions opt;
      opt.svg = !no_svg;
      std::cout << qmwp::cmd_theory(config, out, opt).dump(2) << "\n";
    }
  } catch (const qmwp::ConfigError& e) {
    return report(2, e);
  } catch (const qmwp::ParameterError& e) {
    return report(2, e);
  } catch (const qmwp::IoError& e) {
    return report(3, e);
  } catch (const qmwp::AnalysisError& e) {
    return report(4, e);
  } catch (const qmwp::Error& e) {
    return report(4, e);
  }
  return 0;
}
