#pragma once

#include "sitrace/report.hpp"

namespace sitrace {

struct AnalyzeResult {
  Report report;
  TraceProfile dimension;
  TraceProfile spectral;
  FrameBounds frame;
  int exit_code = 0;  // 0 ok, 2 config error (thrown), 3 certification refusal
};

struct VerifyResult {
  Report report;
  std::vector<ResidualRow> rows;  // per-equation residuals (wavelet check)
  int exit_code = 0;              // 0 pass, 1 fail, 4 inconclusive
};

struct PropertiesResult {
  Report report;
  int exit_code = 0;  // 0 all pass, 1 otherwise
};

/// Loads a catalog (or user) system and applies the optional perturbation:
/// a compactly supported cosine bump added to the first generator, used as a
/// sensitivity control for the harness.
GeneratorSystem load_system(const RunConfig& cfg, const std::string& selector);

/// Multi-generator Paley-Wiener system for the band |xi| < cut (1-D): one
/// indicator generator per length-2pi slice, each quasi-orthogonal.
GeneratorSystem paley_wiener_system(double cut);

/// Certification plus dimension/spectral profiles and frame-bound extremes.
AnalyzeResult run_analyze(const RunConfig& cfg);

/// One named certificate: ntf | full-space | wavelet | scaling-match | mra.
VerifyResult run_verify(const RunConfig& cfg);

/// The structural identity battery over the exactly-representable catalog:
/// periodicity, linearity, additivity, monotony, modulation, dilation,
/// trace-frame invariance, injectivity, convergence, plus negative controls.
PropertiesResult run_properties(const RunConfig& cfg);

}  // namespace sitrace
