#include "sitrace/catalog.hpp"

#include <cmath>

namespace sitrace {

namespace {

// sin(x)/x with the removable singularity filled by series below 1e-4.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

cplx shannon_scaling_eval(std::span<const double> xi) {
  return (xi[0] >= -pi && xi[0] < pi) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
}

cplx shannon_wavelet_eval(std::span<const double> xi) {
  const double x = xi[0];
  const bool in = (x >= -two_pi && x < -pi) || (x >= pi && x < two_pi);
  return in ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
}

// chi_[0,1) on the time side: exp(-i xi/2) sinc(xi/2).
cplx haar_scaling_eval(std::span<const double> xi) {
  const double x = xi[0];
  return std::polar(sinc(x / 2.0), -x / 2.0);
}

// chi_[0,1/2) - chi_[1/2,1):  i exp(-i xi/2) sin(xi/4) sinc(xi/4).
cplx haar_wavelet_eval(std::span<const double> xi) {
  const double x = xi[0];
  const double mag = std::sin(x / 4.0) * sinc(x / 4.0);
  return cplx{0.0, 1.0} * std::polar(mag, -x / 2.0);
}

// C^3 polynomial ramp: nu(0)=0, nu(1)=1, three vanishing derivatives at both ends.
double meyer_ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

cplx meyer_scaling_eval(std::span<const double> xi) {
  const double a = std::abs(xi[0]);
  if (a <= two_pi / 3.0) return cplx{1.0, 0.0};
  if (a >= 2.0 * two_pi / 3.0) return cplx{0.0, 0.0};
  return cplx{std::cos(pi / 2.0 * meyer_ramp(3.0 * a / two_pi - 1.0)), 0.0};
}

cplx meyer_wavelet_eval(std::span<const double> xi) {
  const double x = xi[0];
  const double a = std::abs(x);
  double mag = 0.0;
  if (a >= two_pi / 3.0 && a <= 2.0 * two_pi / 3.0)
    mag = std::sin(pi / 2.0 * meyer_ramp(3.0 * a / two_pi - 1.0));
  else if (a > 2.0 * two_pi / 3.0 && a <= 4.0 * two_pi / 3.0)
    mag = std::cos(pi / 2.0 * meyer_ramp(3.0 * a / (2.0 * two_pi) - 1.0));
  else
    return cplx{0.0, 0.0};
  return std::polar(mag, x / 2.0);
}

GeneratorSystem single(std::string name, GeneratorSpectrum g, SystemRole role) {
  GeneratorSystem sys;
  sys.name = std::move(name);
  sys.dim = g.dim();
  sys.claimed_role = role;
  sys.generators.push_back(std::move(g));
  return sys;
}

GeneratorSystem make_bspline(int order) {
  if (order < 1 || order > 12) throw catalog_error("bspline order must be in [1, 12]");
  DecayEnvelope env;
  env.C = std::pow(4.0, order);
  env.p = static_cast<double>(order);
  const int m = order;
  auto eval = [m](std::span<const double> xi) -> cplx {
    const double x = xi[0];
    return std::polar(std::pow(sinc(x / 2.0), m), -static_cast<double>(m) * x / 2.0);
  };
  return single("bspline:" + std::to_string(order),
                GeneratorSpectrum("bspline:" + std::to_string(order), 1, eval, env,
                                  "C^" + std::to_string(order - 2) + " piecewise polynomial"),
                order == 1 ? SystemRole::NtfGenerator : SystemRole::Frame);
}

GeneratorSystem make_tensor(const std::string& params,
                            const std::map<std::string, GeneratorSystem>& user) {
  std::vector<GeneratorSystem> parts;
  std::size_t start = 0;
  while (start <= params.size()) {
    const std::size_t comma = params.find(',', start);
    const std::string piece =
        params.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (piece.empty()) throw catalog_error("tensor: empty component name");
    parts.push_back(catalog_get(piece, user));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() < 2) throw catalog_error("tensor: needs at least two components");
  for (const auto& p : parts)
    if (p.dim != 1 || p.generators.size() != 1)
      throw catalog_error("tensor: components must be single-generator 1-D systems");

  const int n = static_cast<int>(parts.size());
  DecayEnvelope env;
  env.C = 1.0;
  env.p = std::numeric_limits<double>::infinity();
  env.support_radius = 0.0;
  env.zero_radius = 0.0;
  bool any_support = true;
  for (const auto& p : parts) {
    const DecayEnvelope& e = p.generators[0].envelope();
    env.C *= e.C;
    env.p = std::min(env.p, e.p);
    if (std::isfinite(e.support_radius))
      env.support_radius = std::max(env.support_radius, e.support_radius);
    else
      any_support = false;
    env.zero_radius = std::max(env.zero_radius, e.zero_radius);
  }
  if (!any_support) env.support_radius = std::numeric_limits<double>::infinity();

  std::vector<GeneratorSpectrum> factors;
  for (const auto& p : parts) factors.push_back(p.generators[0]);
  auto eval = [factors](std::span<const double> xi) -> cplx {
    cplx v{1.0, 0.0};
    for (std::size_t i = 0; i < factors.size(); ++i) {
      v *= factors[i].evaluate(xi.subspan(i, 1));
      if (v == cplx{0.0, 0.0}) return v;
    }
    return v;
  };

  SystemRole role = SystemRole::NtfGenerator;
  for (const auto& p : parts)
    if (p.claimed_role != SystemRole::NtfGenerator) role = SystemRole::Unverified;

  const std::string name = "tensor:" + params;
  return single(name, GeneratorSpectrum(name, n, eval, env), role);
}

}  // namespace

GeneratorSpectrum make_piecewise_spectrum(const std::string& name,
                                          std::vector<PiecewisePiece> pieces) {
  if (pieces.empty()) throw catalog_error("piecewise spectrum needs at least one piece");
  double reach = 0.0;
  double peak = 0.0;
  for (const auto& pc : pieces) {
    if (!(pc.lo < pc.hi)) throw catalog_error("piecewise spectrum: empty interval");
    reach = std::max({reach, std::abs(pc.lo), std::abs(pc.hi)});
    for (int s = 0; s <= 64; ++s) {
      const double x = pc.lo + (pc.hi - pc.lo) * s / 64.0;
      cplx v{0.0, 0.0};
      double xp = 1.0;
      for (const cplx& c : pc.coeffs) {
        v += c * xp;
        xp *= x;
      }
      peak = std::max(peak, std::abs(v));
    }
  }
  DecayEnvelope env;
  env.C = 1.05 * peak + 1e-12;
  env.p = 0.0;
  env.support_radius = reach;
  auto eval = [pieces](std::span<const double> xi) -> cplx {
    const double x = xi[0];
    for (const auto& pc : pieces) {
      if (x >= pc.lo && x < pc.hi) {
        cplx v{0.0, 0.0};
        double xp = 1.0;
        for (const cplx& c : pc.coeffs) {
          v += c * xp;
          xp *= x;
        }
        return v * std::polar(1.0, pc.freq * x);
      }
    }
    return cplx{0.0, 0.0};
  };
  return GeneratorSpectrum(name, 1, std::move(eval), env, "piecewise polynomial");
}

GeneratorSystem catalog_get(const std::string& selector,
                            const std::map<std::string, GeneratorSystem>& user_spectra) {
  const std::size_t colon = selector.find(':');
  const std::string head = selector.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : selector.substr(colon + 1);

  if (head == "shannon-scaling") {
    DecayEnvelope env{1.0, 0.0, pi};
    return single(selector, GeneratorSpectrum(selector, 1, shannon_scaling_eval, env, "indicator"),
                  SystemRole::NtfGenerator);
  }
  if (head == "shannon-wavelet") {
    DecayEnvelope env{1.0, 0.0, two_pi, pi};
    return single(selector, GeneratorSpectrum(selector, 1, shannon_wavelet_eval, env, "indicator"),
                  SystemRole::NtfGenerator);
  }
  if (head == "haar-scaling") {
    DecayEnvelope env{4.0, 1.0};
    return single(selector, GeneratorSpectrum(selector, 1, haar_scaling_eval, env, "analytic"),
                  SystemRole::NtfGenerator);
  }
  if (head == "haar-wavelet") {
    DecayEnvelope env{8.0, 1.0};
    env.vm_order = 1.0;
    env.vm_coeff = 0.25;
    env.vm_radius = std::numeric_limits<double>::infinity();
    return single(selector, GeneratorSpectrum(selector, 1, haar_wavelet_eval, env, "analytic"),
                  SystemRole::NtfGenerator);
  }
  if (head == "bspline") {
    if (params.empty()) throw catalog_error("bspline requires an order, e.g. bspline:2");
    int order = 0;
    try {
      order = std::stoi(params);
    } catch (const std::exception&) {
      throw catalog_error("bspline: bad order '" + params + "'");
    }
    return make_bspline(order);
  }
  if (head == "meyer-scaling") {
    DecayEnvelope env{1.0, 0.0, 2.0 * two_pi / 3.0};
    return single(selector, GeneratorSpectrum(selector, 1, meyer_scaling_eval, env, "C^3 ramp"),
                  SystemRole::NtfGenerator);
  }
  if (head == "meyer-wavelet") {
    DecayEnvelope env{1.0, 0.0, 4.0 * two_pi / 3.0, two_pi / 3.0};
    return single(selector, GeneratorSpectrum(selector, 1, meyer_wavelet_eval, env, "C^3 ramp"),
                  SystemRole::NtfGenerator);
  }
  if (head == "zero") {
    DecayEnvelope env{0.0, 1.0, 0.0};
    return single(selector,
                  GeneratorSpectrum(selector, 1,
                                    [](std::span<const double>) { return cplx{0.0, 0.0}; }, env),
                  SystemRole::Unverified);
  }
  if (head == "tensor") {
    if (params.empty()) throw catalog_error("tensor requires component names");
    return make_tensor(params, user_spectra);
  }
  if (head == "user") {
    auto it = user_spectra.find(params);
    if (it == user_spectra.end()) throw catalog_error("unknown user spectrum '" + params + "'");
    return it->second;
  }
  throw catalog_error("unknown catalog system '" + selector + "'");
}

std::vector<std::string> catalog_names() {
  return {"shannon-scaling", "shannon-wavelet", "haar-scaling",  "haar-wavelet", "bspline:<m>",
          "meyer-scaling",   "meyer-wavelet",   "tensor:<a,b,…>", "user:<name>",  "zero"};
}

}  // namespace sitrace
