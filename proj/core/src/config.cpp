#include "sitrace/config.hpp"

#include <charconv>
#include <sstream>

namespace sitrace {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw config_error("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw config_error("config field '" + field + "': bad number '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used, 0);
    if (used != v.size()) throw config_error("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw config_error("config field '" + field + "': bad integer '" + v + "'");
  }
}

bool parse_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error("config field '" + field + "': bad boolean '" + v + "'");
}

std::vector<std::int64_t> parse_int_list(const std::string& field, const std::string& v) {
  std::vector<std::int64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(field, trim(item)));
  if (out.empty()) throw config_error("config field '" + field + "': empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& field, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(field, trim(item)));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (grid == 0) throw config_error("config field 'grid': must be positive");
  if (window < 1) throw config_error("config field 'window': must be positive");
  if (depth < 1) throw config_error("config field 'depth': must be positive");
  if (s_range < 1) throw config_error("config field 's_range': must be positive");
  for (auto [name, v] : {std::pair<const char*, double>{"tol", tol},
                         {"rank_tol", rank_tol},
                         {"tail_tol", tail_tol}})
    if (!(v > 0.0 && v < 1.0))
      throw config_error(std::string("config field '") + name + "': must lie in (0, 1)");
  if (format != "json" && format != "csv" && format != "csv,json" && format != "json,csv")
    throw config_error("config field 'format': expected csv, json, or csv,json");
  if (perturb < 0.0) throw config_error("config field 'perturb': must be nonnegative");
  const std::size_t n2 = dilation.size();
  std::size_t n = 1;
  while (n * n < n2) ++n;
  if (n * n != n2)
    throw config_error("config field 'dilation': entry count must be a perfect square");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section = "run";
  std::string spectrum_name;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      const std::string head = trim(t.substr(1, t.size() - 2));
      if (head == "run") {
        section = "run";
      } else if (head.rfind("spectrum ", 0) == 0) {
        section = "spectrum";
        spectrum_name = trim(head.substr(9));
        if (spectrum_name.empty()) throw config_error("config: spectrum section needs a name");
        cfg.spectrum_sections[spectrum_name];
      } else {
        throw config_error("config: unknown section '" + head + "'");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw config_error("config: expected key = value, got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (section == "spectrum") {
      if (key != "piece") throw config_error("config field '" + key + "': unknown in [spectrum]");
      cfg.spectrum_sections[spectrum_name].push_back(val);
      continue;
    }
    if (key == "command") cfg.command = val;
    else if (key == "system") cfg.system = val;
    else if (key == "wavelet") cfg.wavelet = val;
    else if (key == "scaling") cfg.scaling = val;
    else if (key == "check") cfg.check = val;
    else if (key == "dilation") cfg.dilation = parse_int_list(key, val);
    else if (key == "grid") cfg.grid = static_cast<std::size_t>(parse_int(key, val));
    else if (key == "window") cfg.window = static_cast<int>(parse_int(key, val));
    else if (key == "depth") cfg.depth = static_cast<int>(parse_int(key, val));
    else if (key == "s_range") cfg.s_range = static_cast<int>(parse_int(key, val));
    else if (key == "tol") cfg.tol = parse_double(key, val);
    else if (key == "rank_tol") cfg.rank_tol = parse_double(key, val);
    else if (key == "tail_tol") cfg.tail_tol = parse_double(key, val);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
    else if (key == "out") cfg.out = val;
    else if (key == "format") cfg.format = val;
    else if (key == "quasi_orthogonalize") cfg.quasi_orthogonalize = parse_bool(key, val);
    else if (key == "unchecked") cfg.unchecked = parse_bool(key, val);
    else if (key == "perturb") cfg.perturb = parse_double(key, val);
    else throw config_error("config field '" + key + "': unknown key");
  }
  cfg.validate();
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "command = " << cfg.command << "\n";
  out << "system = " << cfg.system << "\n";
  out << "wavelet = " << cfg.wavelet << "\n";
  out << "scaling = " << cfg.scaling << "\n";
  out << "check = " << cfg.check << "\n";
  out << "dilation = ";
  for (std::size_t i = 0; i < cfg.dilation.size(); ++i)
    out << (i ? "," : "") << cfg.dilation[i];
  out << "\n";
  out << "grid = " << cfg.grid << "\n";
  out << "window = " << cfg.window << "\n";
  out << "depth = " << cfg.depth << "\n";
  out << "s_range = " << cfg.s_range << "\n";
  out << "tol = " << format_double(cfg.tol) << "\n";
  out << "rank_tol = " << format_double(cfg.rank_tol) << "\n";
  out << "tail_tol = " << format_double(cfg.tail_tol) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "out = " << cfg.out << "\n";
  out << "format = " << cfg.format << "\n";
  out << "quasi_orthogonalize = " << (cfg.quasi_orthogonalize ? "true" : "false") << "\n";
  out << "unchecked = " << (cfg.unchecked ? "true" : "false") << "\n";
  out << "perturb = " << format_double(cfg.perturb) << "\n";
  for (const auto& [name, pieces] : cfg.spectrum_sections) {
    out << "\n[spectrum " << name << "]\n";
    for (const auto& p : pieces) out << "piece = " << p << "\n";
  }
  return out.str();
}

std::map<std::string, GeneratorSystem> user_spectra(const RunConfig& cfg) {
  std::map<std::string, GeneratorSystem> reg;
  for (const auto& [name, lines] : cfg.spectrum_sections) {
    std::vector<PiecewisePiece> pieces;
    for (const auto& line : lines) {
      // lo,hi : c0,c1,... : freq
      std::vector<std::string> parts;
      std::stringstream ss(line);
      std::string seg;
      while (std::getline(ss, seg, ':')) parts.push_back(trim(seg));
      if (parts.size() != 3)
        throw config_error("spectrum '" + name + "': piece needs 'lo,hi : coeffs : freq'");
      const auto ends = parse_double_list("piece", parts[0]);
      if (ends.size() != 2) throw config_error("spectrum '" + name + "': bad interval");
      PiecewisePiece pc;
      pc.lo = ends[0];
      pc.hi = ends[1];
      for (double c : parse_double_list("piece", parts[1])) pc.coeffs.push_back(cplx{c, 0.0});
      pc.freq = parse_double("piece", parts[2]);
      pieces.push_back(std::move(pc));
    }
    GeneratorSystem sys;
    sys.name = "user:" + name;
    sys.dim = 1;
    sys.claimed_role = SystemRole::Unverified;
    sys.generators.push_back(make_piecewise_spectrum("user:" + name, std::move(pieces)));
    reg.emplace(name, std::move(sys));
  }
  return reg;
}

}  // namespace sitrace
