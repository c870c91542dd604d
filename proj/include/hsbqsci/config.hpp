#pragma once

// Run configuration: flat `key = value` lines grouped under optional
// `[section]` headers. `[initial_state]` may repeat; every other section
// may appear once.
//
//   integrals = ../data/h2o.fcidump
//   dt = 1
//   k_max = 10
//   shots = 10000
//   seed = 7
//   [initial_state]
//   det = 1.0 hf
//   [noise]
//   flip_prob = 0.02
//   [sccr]
//   enabled = true

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "determinant.hpp"
#include "pauli.hpp"
#include "sampler.hpp"
#include "sci.hpp"

namespace hsbqsci {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "config line " + std::to_string(line) + ": " + what : "config: " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Sum of coefficient-weighted determinants. A term without a determinant
/// stands for the aufbau reference.
struct InitialStateSpec {
  struct Term {
    double coefficient = 1.0;
    std::optional<Determinant> det;  // empty: reference determinant
  };
  std::vector<Term> terms;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  std::string integrals_path;
  std::vector<InitialStateSpec> initial_states;  // empty: the reference determinant alone

  double dt = 1.0;
  std::size_t k_max = 10;
  std::uint64_t shots = 10000;
  std::uint64_t seed = 0;
  OrderingScheme ordering = OrderingScheme::magnitude;
  std::optional<std::size_t> locality;

  std::optional<NoiseSpec> noise;

  bool sccr = false;
  std::size_t sccr_max_iterations = 10;

  bool spin_completion = true;
  bool irrep_filter = false;
  Backend backend = Backend::automatic;
  bool compute_casci = true;

  std::string report_path;
  std::string kv_path;
  std::string determinants_path;

  void validate() const {
    if (integrals_path.empty()) throw ConfigError(0, "missing 'integrals'");
    if (shots < 1) throw ConfigError(0, "shots must be >= 1");
    if (k_max < 1) throw ConfigError(0, "k_max must be >= 1");
    if (!(dt >= 0.0)) throw ConfigError(0, "dt must be >= 0");
    if (sccr_max_iterations < 1) throw ConfigError(0, "sccr max_iterations must be >= 1");
    if (noise) noise->validate();
    for (const auto& s : initial_states) {
      if (s.terms.empty()) throw ConfigError(0, "initial_state without any 'det' line");
      bool nonzero = false;
      for (const auto& t : s.terms) nonzero = nonzero || t.coefficient != 0.0;
      if (!nonzero) throw ConfigError(0, "initial_state coefficients are all zero");
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError(line, "expected a boolean, got '" + v + "'");
}

template <class T>
T parse_number(const std::string& v, std::size_t line) {
  std::istringstream in(v);
  T x{};
  if (!(in >> x) || !(in >> std::ws).eof()) throw ConfigError(line, "expected a number, got '" + v + "'");
  if constexpr (std::is_unsigned_v<T>)
    if (v.find('-') != std::string::npos) throw ConfigError(line, "expected a non-negative integer, got '" + v + "'");
  return x;
}

inline InitialStateSpec::Term parse_det_term(const std::string& v, std::size_t line) {
  std::istringstream in(v);
  std::string coef, occ, extra;
  if (!(in >> coef >> occ) || (in >> extra))
    throw ConfigError(line, "det expects '<coefficient> <occupation|hf>'");
  InitialStateSpec::Term t;
  t.coefficient = parse_number<double>(coef, line);
  if (occ != "hf") {
    try {
      t.det = Determinant::from_occupation_string(occ);
    } catch (const std::exception& e) {
      throw ConfigError(line, e.what());
    }
  }
  return t;
}

}  // namespace detail

/// Relative `integrals` and output paths resolve against `base_dir`.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  RunConfig cfg;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  bool seen_noise = false, seen_sccr = false, seen_output = false;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() || base_dir.empty() ? path : base_dir / path).lexically_normal().string();
  };
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto text = detail::trim(raw);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(line, "unterminated section header");
      section = detail::trim(text.substr(1, text.size() - 2));
      if (section == "initial_state") {
        cfg.initial_states.emplace_back();
      } else if (section == "noise") {
        if (seen_noise) throw ConfigError(line, "duplicate [noise] section");
        seen_noise = true;
        cfg.noise = NoiseSpec{};
      } else if (section == "sccr") {
        if (seen_sccr) throw ConfigError(line, "duplicate [sccr] section");
        seen_sccr = true;
        cfg.sccr = true;
      } else if (section == "output") {
        if (seen_output) throw ConfigError(line, "duplicate [output] section");
        seen_output = true;
      } else {
        throw ConfigError(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const auto key = detail::trim(text.substr(0, eq));
    const auto val = detail::trim(text.substr(eq + 1));
    if (val.empty()) throw ConfigError(line, "empty value for '" + key + "'");
    auto unknown = [&] { return ConfigError(line, "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]")); };

    try {
      if (section.empty()) {
        if (key == "integrals") cfg.integrals_path = resolve(val);
        else if (key == "dt") cfg.dt = detail::parse_number<double>(val, line);
        else if (key == "k_max") cfg.k_max = detail::parse_number<std::size_t>(val, line);
        else if (key == "shots") cfg.shots = detail::parse_number<std::uint64_t>(val, line);
        else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(val, line);
        else if (key == "ordering") cfg.ordering = parse_ordering(val);
        else if (key == "locality") cfg.locality = detail::parse_number<std::size_t>(val, line);
        else if (key == "spin_completion") cfg.spin_completion = detail::parse_bool(val, line);
        else if (key == "irrep_filter") cfg.irrep_filter = detail::parse_bool(val, line);
        else if (key == "backend") cfg.backend = parse_backend(val);
        else if (key == "casci") cfg.compute_casci = detail::parse_bool(val, line);
        else throw unknown();
      } else if (section == "initial_state") {
        auto& st = cfg.initial_states.back();
        if (key == "det") st.terms.push_back(detail::parse_det_term(val, line));
        else if (key == "seed") st.seed = detail::parse_number<std::uint64_t>(val, line);
        else throw unknown();
      } else if (section == "noise") {
        if (key == "flip_prob") cfg.noise->flip_prob = detail::parse_number<double>(val, line);
        else if (key == "seed") cfg.noise->seed = detail::parse_number<std::uint64_t>(val, line);
        else throw unknown();
      } else if (section == "sccr") {
        if (key == "enabled") cfg.sccr = detail::parse_bool(val, line);
        else if (key == "max_iterations") cfg.sccr_max_iterations = detail::parse_number<std::size_t>(val, line);
        else throw unknown();
      } else if (section == "output") {
        if (key == "report") cfg.report_path = resolve(val);
        else if (key == "kv") cfg.kv_path = resolve(val);
        else if (key == "determinants") cfg.determinants_path = resolve(val);
        else throw unknown();
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(line, e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline RunConfig parse_config_string(const std::string& text, const std::filesystem::path& base_dir = {}) {
  std::istringstream in(text);
  return parse_config(in, base_dir);
}

inline RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path());
}

}  // namespace hsbqsci
