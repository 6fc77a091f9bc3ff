#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sitrace/catalog.hpp"

namespace sitrace {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One run of the tool: system selectors, resolutions, truncation knobs,
/// tolerances, output control. Serializes to a flat key = value text with
/// sections and parses back losslessly.
struct RunConfig {
  std::string command = "properties";
  std::string system;
  std::string wavelet;
  std::string scaling;
  std::string check;
  std::vector<std::int64_t> dilation = {2};
  std::size_t grid = 1024;
  int window = 128;
  int depth = 30;
  int s_range = 8;
  double tol = 1e-9;
  double rank_tol = 1e-8;
  double tail_tol = 1e-6;
  std::uint64_t seed = 0x5EED;
  std::string out;
  std::string format = "json";
  bool quasi_orthogonalize = false;
  bool unchecked = false;
  double perturb = 0.0;
  /// Raw piece lines of user spectra, keyed by name ([spectrum <name>]
  /// sections). Kept as text so serialization round-trips exactly.
  std::map<std::string, std::vector<std::string>> spectrum_sections;

  void validate() const;
};

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

/// Builds the user spectrum registry from the config's spectrum sections.
std::map<std::string, GeneratorSystem> user_spectra(const RunConfig& cfg);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

}  // namespace sitrace
