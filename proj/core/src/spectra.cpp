#include "sitrace/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sitrace/grid.hpp"

namespace sitrace {

std::string to_string(SystemRole role) {
  switch (role) {
    case SystemRole::NtfGenerator: return "ntf-generator";
    case SystemRole::Bessel: return "bessel";
    case SystemRole::Frame: return "frame";
    case SystemRole::Unverified: return "unverified";
  }
  return "unverified";
}

namespace {

double shell_count(int n, double m) {
  // number of lattice points with |k|_inf == m
  return std::pow(2.0 * m + 1.0, n) - std::pow(2.0 * m - 1.0, n);
}

}  // namespace

double fiber_tail_sq(const DecayEnvelope& env, int dim, int radius, double xi_inf,
                     double inv_scale) {
  if (env.C == 0.0) return 0.0;
  const double B = inv_scale;
  double acc = 0.0;
  const bool compact = std::isfinite(env.support_radius);
  // Shell m contributes at most s(m) * sup{|g|^2 : |arg| >= (2 pi m - xi)/B}.
  const std::size_t cap = 4000;
  std::size_t m = static_cast<std::size_t>(radius) + 1;
  std::size_t steps = 0;
  for (; steps < cap; ++m, ++steps) {
    const double r = std::max(0.0, two_pi * static_cast<double>(m) - xi_inf) / B;
    if (compact && r > env.support_radius) return acc;  // all further shells vanish
    const double b = env.bound_beyond(r);
    acc += shell_count(dim, static_cast<double>(m)) * b * b;
  }
  // Analytic remainder for the power envelope; requires 2p > n.
  if (2.0 * env.p <= static_cast<double>(dim))
    return std::numeric_limits<double>::infinity();
  double M = static_cast<double>(m);
  if (two_pi * M - xi_inf < pi * M) {
    // ensure 2 pi t - xi >= pi t on the remainder range
    M = std::max(M, xi_inf / pi);
    for (; static_cast<double>(m) < M; ++m) {
      const double r = std::max(0.0, two_pi * static_cast<double>(m) - xi_inf) / B;
      const double b = env.bound_beyond(r);
      acc += shell_count(dim, static_cast<double>(m)) * b * b;
    }
  }
  const double q = 2.0 * env.p - static_cast<double>(dim);
  const double remainder = 2.0 * dim * std::pow(3.0, dim - 1) * env.C * env.C *
                           std::pow(B / pi, 2.0 * env.p) * std::pow(M, -q) / q;
  return acc + remainder;
}

double lattice_sum_sq(const DecayEnvelope& env, int dim, std::span<const double> xi,
                      double inv_scale) {
  std::vector<double> folded(xi.size());
  std::vector<std::int64_t> shift(xi.size());
  recenter(xi, folded, shift);
  const double d = max_abs_norm(folded);
  const double b0 = env.bound_beyond(d / inv_scale);
  return b0 * b0 + fiber_tail_sq(env, dim, 0, d, inv_scale);
}

FiberVector fiber(const GeneratorSpectrum& g, std::span<const double> xi, const IndexWindow& W) {
  if (g.dim() != W.dim() || static_cast<int>(xi.size()) != W.dim())
    throw std::invalid_argument("fiber: dimension mismatch");
  FiberVector f;
  f.values.resize(static_cast<Eigen::Index>(W.size()));
  std::vector<double> arg(xi.size());
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto k = W.at(i);
    for (std::size_t d = 0; d < arg.size(); ++d)
      arg[d] = xi[d] + two_pi * static_cast<double>(k[d]);
    f.values[static_cast<Eigen::Index>(i)] = g.evaluate(arg);
  }
  f.tail_bound = fiber_tail_sq(g.envelope(), W.dim(), W.radius(), max_abs_norm(xi));
  return f;
}

ValueWithError periodization(const GeneratorSpectrum& g, std::span<const double> xi,
                             const IndexWindow& W) {
  FiberVector f = fiber(g, xi, W);
  return {f.norm_sq(), f.tail_bound};
}

namespace {

double windowed_periodization_folded(const GeneratorSpectrum& g, const IndexWindow& W,
                                     std::span<const double> xi) {
  std::vector<double> folded(xi.size());
  std::vector<std::int64_t> shift(xi.size());
  recenter(xi, folded, shift);
  double per = 0.0;
  std::vector<double> arg(xi.size());
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto k = W.at(i);
    for (std::size_t d = 0; d < arg.size(); ++d)
      arg[d] = folded[d] + two_pi * static_cast<double>(k[d]);
    per += std::norm(g.evaluate(arg));
  }
  return per;
}

}  // namespace

GeneratorSpectrum quasi_orthogonalize(const GeneratorSpectrum& g, const IndexWindow& W,
                                      double tol) {
  if (g.dim() != W.dim()) throw std::invalid_argument("quasi_orthogonalize: dimension mismatch");
  // Estimate a positive lower bound of the periodization where it is alive;
  // the rescaled spectrum inherits the envelope divided by its square root.
  const Grid probe = fundamental_grid(g.dim(), g.dim() == 1 ? 257 : 17);
  double per_min = 1.0;
  bool seen = false;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double per = windowed_periodization_folded(g, W, probe.point(i));
    if (per > 10.0 * tol) {
      per_min = seen ? std::min(per_min, per) : per;
      seen = true;
    }
  }
  const double floor = std::sqrt(std::max(seen ? per_min : tol, tol));

  DecayEnvelope env = g.envelope();
  env.C /= floor;
  env.vm_coeff /= floor;

  GeneratorSpectrum base = g;
  IndexWindow win = W;
  auto eval = [base, win, tol](std::span<const double> xi) -> cplx {
    const double per = windowed_periodization_folded(base, win, xi);
    if (per <= tol) return cplx{0.0, 0.0};
    return base.evaluate(xi) / std::sqrt(per);
  };
  return GeneratorSpectrum(g.name() + "#qo", g.dim(), std::move(eval), env, g.smoothness_note());
}

std::vector<std::size_t> quasi_orthogonalize_ambiguities(const GeneratorSpectrum& g,
                                                         const IndexWindow& W, double tol,
                                                         const Grid& grid) {
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double per = windowed_periodization_folded(g, W, grid.point(i));
    if (per >= tol && per <= 10.0 * tol) flagged.push_back(i);
  }
  return flagged;
}

GeneratorSpectrum modulate(const GeneratorSpectrum& g, std::span<const double> a) {
  if (static_cast<int>(a.size()) != g.dim())
    throw std::invalid_argument("modulate: dimension mismatch");
  const double a_inf = max_abs_norm(a);
  DecayEnvelope env = g.envelope();
  env.C *= std::pow(1.0 + a_inf, env.p);
  if (std::isfinite(env.support_radius)) env.support_radius += a_inf;
  env.zero_radius = std::max(0.0, env.zero_radius - a_inf);
  if (a_inf != 0.0) {
    env.vm_order = 0.0;
    env.vm_coeff = 0.0;
    env.vm_radius = 0.0;
  }
  GeneratorSpectrum base = g;
  std::vector<double> shift(a.begin(), a.end());
  auto eval = [base, shift](std::span<const double> xi) -> cplx {
    std::vector<double> arg(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) arg[i] = xi[i] - shift[i];
    return base.evaluate(arg);
  };
  return GeneratorSpectrum(g.name() + "#mod", g.dim(), std::move(eval), env,
                           g.smoothness_note());
}

GeneratorSystem modulate(const GeneratorSystem& sys, std::span<const double> a) {
  GeneratorSystem out;
  out.name = sys.name + "#mod";
  out.dim = sys.dim;
  out.claimed_role = sys.claimed_role;
  for (const auto& g : sys.generators) out.generators.push_back(modulate(g, a));
  return out;
}

GeneratorSystem quasi_orthogonalize(const GeneratorSystem& sys, const IndexWindow& W,
                                    double tol) {
  GeneratorSystem out;
  out.name = sys.name + "#qo";
  out.dim = sys.dim;
  out.claimed_role = sys.claimed_role;
  for (const auto& g : sys.generators) out.generators.push_back(quasi_orthogonalize(g, W, tol));
  return out;
}

std::optional<std::vector<double>> envelope_violation(const GeneratorSpectrum& g,
                                                      std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const DecayEnvelope& env = g.envelope();
  const double reach =
      std::isfinite(env.support_radius) ? 1.5 * env.support_radius + 1.0 : 64.0;
  std::uniform_real_distribution<double> dist(-reach, reach);
  std::vector<double> xi(static_cast<std::size_t>(g.dim()));
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& x : xi) x = dist(rng);
    const double r = max_abs_norm(xi);
    const double val = std::abs(g.evaluate(xi));
    if (r > env.support_radius && val > 1e-14) return xi;
    if (r < env.zero_radius && val > 1e-14) return xi;
    if (val > 1.01 * env.C * std::pow(1.0 + r, -env.p)) return xi;
    if (env.vm_order > 0.0 && r <= env.vm_radius &&
        val > 1.01 * env.vm_coeff * std::pow(r, env.vm_order))
      return xi;
  }
  return std::nullopt;
}

}  // namespace sitrace
