#include "sitrace/report.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sitrace/version.hpp"

namespace sitrace {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  j["system"] = cfg.system;
  j["wavelet"] = cfg.wavelet;
  j["scaling"] = cfg.scaling;
  j["check"] = cfg.check;
  j["dilation"] = cfg.dilation;
  j["grid"] = cfg.grid;
  j["window"] = cfg.window;
  j["depth"] = cfg.depth;
  j["s_range"] = cfg.s_range;
  j["tol"] = format_double(cfg.tol);
  j["rank_tol"] = format_double(cfg.rank_tol);
  j["tail_tol"] = format_double(cfg.tail_tol);
  j["seed"] = cfg.seed;
  j["format"] = cfg.format;
  j["quasi_orthogonalize"] = cfg.quasi_orthogonalize;
  j["unchecked"] = cfg.unchecked;
  j["perturb"] = format_double(cfg.perturb);
  return j;
}

}  // namespace

std::size_t Report::passed() const {
  std::size_t n = 0;
  for (const auto& c : checks)
    if (c.verdict == Verdict::Pass) ++n;
  return n;
}

std::size_t Report::failed() const {
  std::size_t n = 0;
  for (const auto& c : checks)
    if (c.verdict == Verdict::Fail) ++n;
  return n;
}

std::size_t Report::inconclusive() const {
  std::size_t n = 0;
  for (const auto& c : checks)
    if (c.verdict == Verdict::Inconclusive) ++n;
  return n;
}

std::string to_json_string(const Report& report) {
  ordered_json j;
  j["schema"] = 1;
  j["version"] = SITRACE_VERSION_STRING;
  j["config"] = config_echo(report.config);
  j["checks"] = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["system"] = c.system;
    e["verdict"] = to_string(c.verdict);
    e["residual"] = format_double(c.residual);
    e["bound"] = format_double(c.bound);
    e["witness"] = c.witness;
    j["checks"].push_back(e);
  }
  ordered_json summary;
  summary["pass"] = report.passed();
  summary["fail"] = report.failed();
  summary["inconclusive"] = report.inconclusive();
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

std::string to_table(const Report& report) {
  std::ostringstream os;
  std::size_t name_w = 5;
  std::size_t sys_w = 6;
  for (const auto& c : report.checks) {
    name_w = std::max(name_w, c.name.size());
    sys_w = std::max(sys_w, c.system.size());
  }
  os << std::left << std::setw(static_cast<int>(name_w) + 2) << "check"
     << std::setw(static_cast<int>(sys_w) + 2) << "system" << std::setw(14) << "verdict"
     << std::setw(14) << "residual" << "bound\n";
  for (const auto& c : report.checks) {
    os << std::left << std::setw(static_cast<int>(name_w) + 2) << c.name
       << std::setw(static_cast<int>(sys_w) + 2) << c.system << std::setw(14)
       << to_string(c.verdict) << std::setw(14) << format_double(c.residual)
       << format_double(c.bound) << "\n";
  }
  os << report.passed() << " pass, " << report.failed() << " fail, " << report.inconclusive()
     << " inconclusive\n";
  return os.str();
}

void write_profile_csv(std::ostream& os, const TraceProfile& profile) {
  const int n = profile.grid.dim();
  for (int d = 0; d < n; ++d) os << "xi_" << (d + 1) << ",";
  os << "value,error_bar\n";
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    auto p = profile.grid.point(i);
    for (int d = 0; d < n; ++d) os << format_double(p[static_cast<std::size_t>(d)]) << ",";
    os << format_double(profile.values[i]) << "," << format_double(profile.error_bars[i])
       << "\n";
  }
}

void write_residual_csv(std::ostream& os, const std::vector<ResidualRow>& rows) {
  os << "xi,eq_id,residual,tail_bound\n";
  for (const auto& r : rows) {
    for (Eigen::Index d = 0; d < r.xi.size(); ++d) os << (d ? ";" : "") << format_double(r.xi[d]);
    os << "," << r.equation << "," << format_double(r.residual) << ","
       << format_double(r.tail) << "\n";
  }
}

void write_frame_bounds_csv(std::ostream& os, const FrameBounds& fb) {
  if (fb.per_point.empty()) return;
  const Eigen::Index n = fb.per_point.front().xi.size();
  for (Eigen::Index d = 0; d < n; ++d) os << "xi_" << (d + 1) << ",";
  os << "min_nonzero_eig,max_eig\n";
  for (const auto& row : fb.per_point) {
    for (Eigen::Index d = 0; d < n; ++d) os << format_double(row.xi[d]) << ",";
    os << format_double(row.min_nonzero) << "," << format_double(row.max) << "\n";
  }
}

}  // namespace sitrace
