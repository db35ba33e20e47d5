#pragma once

// INI-style experiment configuration:
//
//   [source]          pair_rate duration corr_width_tau_c spectral_fwhm_lambda
//                     center_wavelength seed
//   [link]            rf_freq rf_mod_index mzm_bias_phase rf_phase gvd beta1
//                     modulate_after_dispersion
//   [detector_signal] efficiency jitter_fwhm dark_rate
//   [detector_idler]  efficiency jitter_fwhm dark_rate
//   [tcspc]           sync_period bin_resolution measurement_time
//   [classical]       pulse_width_tau_p            (optional)
//
// Units are fixed (see params.hpp); values carry no unit suffix. Missing keys
// keep their defaults, unknown sections or keys are rejected.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "qmwp/errors.hpp"
#include "qmwp/params.hpp"

namespace qmwp {

namespace detail {

inline double parse_double(const std::string& field, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError(field + ": not a number: '" + text + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& field, const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(field + ": not an unsigned integer: '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(field + ": not a boolean: '" + text + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

template <typename Get>
Setter set_double(Get get) {
  return [get](ExperimentConfig& c, const std::string& f, const std::string& v) {
    get(c) = parse_double(f, v);
  };
}

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"source.pair_rate", set_double([](ExperimentConfig& c) -> double& { return c.source.pair_rate; })},
      {"source.duration", set_double([](ExperimentConfig& c) -> double& { return c.source.duration; })},
      {"source.corr_width_tau_c", set_double([](ExperimentConfig& c) -> double& { return c.source.corr_width_tau_c; })},
      {"source.spectral_fwhm_lambda", set_double([](ExperimentConfig& c) -> double& { return c.source.spectral_fwhm_lambda; })},
      {"source.center_wavelength", set_double([](ExperimentConfig& c) -> double& { return c.source.center_wavelength; })},
      {"source.seed",
       [](ExperimentConfig& c, const std::string& f, const std::string& v) {
         c.source.seed = parse_u64(f, v);
       }},
      {"link.rf_freq", set_double([](ExperimentConfig& c) -> double& { return c.link.rf_freq; })},
      {"link.rf_mod_index", set_double([](ExperimentConfig& c) -> double& { return c.link.rf_mod_index; })},
      {"link.mzm_bias_phase", set_double([](ExperimentConfig& c) -> double& { return c.link.mzm_bias_phase; })},
      {"link.rf_phase", set_double([](ExperimentConfig& c) -> double& { return c.link.rf_phase; })},
      {"link.gvd", set_double([](ExperimentConfig& c) -> double& { return c.link.gvd; })},
      {"link.beta1", set_double([](ExperimentConfig& c) -> double& { return c.link.beta1; })},
      {"link.modulate_after_dispersion",
       [](ExperimentConfig& c, const std::string& f, const std::string& v) {
         c.link.modulate_after_dispersion = parse_bool(f, v);
       }},
      {"detector_signal.efficiency", set_double([](ExperimentConfig& c) -> double& { return c.detector_signal.efficiency; })},
      {"detector_signal.jitter_fwhm", set_double([](ExperimentConfig& c) -> double& { return c.detector_signal.jitter_fwhm; })},
      {"detector_signal.dark_rate", set_double([](ExperimentConfig& c) -> double& { return c.detector_signal.dark_rate; })},
      {"detector_idler.efficiency", set_double([](ExperimentConfig& c) -> double& { return c.detector_idler.efficiency; })},
      {"detector_idler.jitter_fwhm", set_double([](ExperimentConfig& c) -> double& { return c.detector_idler.jitter_fwhm; })},
      {"detector_idler.dark_rate", set_double([](ExperimentConfig& c) -> double& { return c.detector_idler.dark_rate; })},
      {"tcspc.sync_period", set_double([](ExperimentConfig& c) -> double& { return c.tcspc.sync_period; })},
      {"tcspc.bin_resolution", set_double([](ExperimentConfig& c) -> double& { return c.tcspc.bin_resolution; })},
      {"tcspc.measurement_time", set_double([](ExperimentConfig& c) -> double& { return c.tcspc.measurement_time; })},
      {"classical.pulse_width_tau_p", set_double([](ExperimentConfig& c) -> double& { return c.classical.pulse_width_tau_p; })},
  };
  return table;
}

}  // namespace detail

/// Parses configuration text. The result is not validated.
inline ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig cfg;
  const auto& table = detail::setters();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key outside of any section: " + section);
    for (const auto& [key, value] : body) {
      const std::string field = section + "." + key;
      auto it = table.find(field);
      if (it == table.end()) throw ConfigError("unknown config field: " + field);
      it->second(cfg, field, value.data());
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form of a configuration. Doubles are printed in shortest
/// round-trip form, so parse_config(to_config_text(c)) reproduces c.
inline std::string to_config_text(const ExperimentConfig& c) {
  std::string out;
  auto line = [&](const char* k, double v) { out += fmt::format("{} = {}\n", k, v); };
  out += "[source]\n";
  line("pair_rate", c.source.pair_rate);
  line("duration", c.source.duration);
  line("corr_width_tau_c", c.source.corr_width_tau_c);
  line("spectral_fwhm_lambda", c.source.spectral_fwhm_lambda);
  line("center_wavelength", c.source.center_wavelength);
  out += fmt::format("seed = {}\n", c.source.seed);
  out += "\n[link]\n";
  line("rf_freq", c.link.rf_freq);
  line("rf_mod_index", c.link.rf_mod_index);
  line("mzm_bias_phase", c.link.mzm_bias_phase);
  line("rf_phase", c.link.rf_phase);
  line("gvd", c.link.gvd);
  line("beta1", c.link.beta1);
  out += fmt::format("modulate_after_dispersion = {}\n", c.link.modulate_after_dispersion);
  for (const auto& [name, d] : {std::pair{"detector_signal", &c.detector_signal},
                                std::pair{"detector_idler", &c.detector_idler}}) {
    out += fmt::format("\n[{}]\n", name);
    line("efficiency", d->efficiency);
    line("jitter_fwhm", d->jitter_fwhm);
    line("dark_rate", d->dark_rate);
  }
  out += "\n[tcspc]\n";
  line("sync_period", c.tcspc.sync_period);
  line("bin_resolution", c.tcspc.bin_resolution);
  line("measurement_time", c.tcspc.measurement_time);
  out += "\n[classical]\n";
  line("pulse_width_tau_p", c.classical.pulse_width_tau_p);
  return out;
}

}  // namespace qmwp
