#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sitrace/config.hpp"
#include "sitrace/gramian.hpp"
#include "sitrace/trace_function.hpp"
#include "sitrace/wavelet.hpp"

namespace sitrace {

struct CheckResult {
  std::string name;
  std::string system;
  Verdict verdict = Verdict::Fail;
  double residual = 0.0;
  double bound = 0.0;
  std::string witness;
};

/// Result bundle of one command. Serialization is deterministic: fixed key
/// order, shortest round-trip numbers, no wall-clock content (timing goes to
/// stderr so reports stay byte-identical for a fixed config and seed).
struct Report {
  RunConfig config;
  std::vector<CheckResult> checks;

  std::size_t passed() const;
  std::size_t failed() const;
  std::size_t inconclusive() const;
};

std::string to_json_string(const Report& report);

/// Plain-text summary table, one line per check.
std::string to_table(const Report& report);

/// CSV emission: UTF-8, header row, LF line endings, shortest round-trip
/// decimals.
void write_profile_csv(std::ostream& os, const TraceProfile& profile);
void write_residual_csv(std::ostream& os, const std::vector<ResidualRow>& rows);
void write_frame_bounds_csv(std::ostream& os, const FrameBounds& fb);

}  // namespace sitrace
