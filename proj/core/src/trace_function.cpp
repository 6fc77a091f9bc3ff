#include "sitrace/trace_function.hpp"

#include <algorithm>
#include <cmath>

namespace sitrace {

namespace {

void require_usable(const CertifiedSystem& sys) {
  if (sys.certificate.verdict == Verdict::Fail)
    throw std::invalid_argument(
        "trace: system '" + sys.system.name +
        "' failed frame certification; the fiber-sum formula does not apply "
        "(re-run after quasi-orthogonalization, or use an unchecked system)");
}

VecXd to_vec(std::span<const double> xi) {
  VecXd v(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t i = 0; i < xi.size(); ++i) v[static_cast<Eigen::Index>(i)] = xi[i];
  return v;
}

}  // namespace

TraceValue local_trace(const CertifiedSystem& sys, const PositiveOperator& T,
                       std::span<const double> xi, const IndexWindow& W, bool cross_check) {
  require_usable(sys);
  if (T.size() != W.size())
    throw std::invalid_argument("local_trace: operator window mismatch");
  TraceValue out;
  double tail_sum = 0.0;
  double mass = 0.0;
  for (const auto& g : sys.system.generators) {
    FiberVector f = fiber(g, xi, W);
    out.value += std::real(inner(T.matrix() * f.values, f.values));
    tail_sum += f.tail_bound;
    mass += f.norm_sq() + f.tail_bound;
  }
  out.error_bar = T.beyond_window_norm() * tail_sum + T.trunc_error() * mass;
  if (cross_check) {
    RangeProjection P = range_projection(sys.system, xi, W);
    const double via_projection = std::real((T.matrix() * P.matrix).trace());
    out.cross_discrepancy = std::abs(out.value - via_projection);
  }
  return out;
}

TraceValue restricted_trace(const CertifiedSystem& sys, const VecXcd& f,
                            std::span<const double> xi, const IndexWindow& W,
                            bool cross_check) {
  require_usable(sys);
  if (static_cast<std::size_t>(f.size()) != W.size())
    throw std::invalid_argument("restricted_trace: probe window mismatch");
  TraceValue out;
  for (const auto& g : sys.system.generators) {
    FiberVector fib = fiber(g, xi, W);
    out.value += std::norm(inner(f, fib.values));
  }
  out.error_bar = 0.0;  // window-supported probes never reach truncated coordinates
  if (cross_check) {
    RangeProjection P = range_projection(sys.system, xi, W);
    out.cross_discrepancy = std::abs(out.value - (P.matrix * f).squaredNorm());
  }
  return out;
}

TraceProfile dimension_function(const CertifiedSystem& sys, const Grid& grid,
                                const IndexWindow& W) {
  require_usable(sys);
  const PositiveOperator I = identity_operator(W);
  TraceProfile p;
  p.grid = grid;
  p.provenance = "fiber-sum";
  p.values.resize(grid.size());
  p.error_bars.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    TraceValue v = local_trace(sys, I, grid.point(i), W);
    p.values[i] = v.value;
    p.error_bars[i] = v.error_bar;
    if (std::abs(v.value - std::round(v.value)) > 1e-6 + v.error_bar)
      p.integer_deviation_flags.push_back(i);
  }
  return p;
}

TraceProfile spectral_function(const CertifiedSystem& sys, const Grid& grid,
                               const IndexWindow& W) {
  require_usable(sys);
  TraceProfile p;
  p.grid = grid;
  p.provenance = "fiber-sum";
  p.values.resize(grid.size());
  p.error_bars.resize(grid.size());
  std::vector<double> folded(static_cast<std::size_t>(grid.dim()));
  std::vector<std::int64_t> shift(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    recenter(grid.point(i), folded, shift);
    const auto pos = W.position(shift);
    if (!pos)
      throw std::invalid_argument(
          "spectral_function: grid point recenters outside the window; enlarge the window");
    VecXcd probe = VecXcd::Zero(static_cast<Eigen::Index>(W.size()));
    probe[static_cast<Eigen::Index>(*pos)] = cplx{1.0, 0.0};
    TraceValue v = restricted_trace(sys, probe, folded, W);
    p.values[i] = v.value;
    p.error_bars[i] = v.error_bar;
  }
  return p;
}

double operator_trace(const PositiveOperator& T, const std::vector<VecXcd>& family) {
  double acc = 0.0;
  for (const auto& e : family) acc += std::real(inner(T.matrix() * e, e));
  return acc;
}

IdentityResidual check_periodicity(const CertifiedSystem& sys, const PositiveOperator& T,
                                   std::span<const double> xi, std::span<const std::int64_t> k,
                                   const IndexWindow& W, double mass_tol) {
  IdentityResidual r;
  PositiveOperator conj = conjugate_by_shift(T, k, W);
  const double added = conj.trunc_error() - T.trunc_error();
  if (added > mass_tol * std::max(1.0, T.norm_bound())) {
    r.untestable = true;
    r.detail = "operator mass near the window boundary was dropped by the shift";
    return r;
  }
  std::vector<double> shifted(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    shifted[i] = xi[i] + two_pi * static_cast<double>(k[i]);
  TraceValue lhs = local_trace(sys, T, shifted, W);
  TraceValue rhs = local_trace(sys, conj, xi, W);
  r.lhs = lhs.value;
  r.rhs = rhs.value;
  r.residual = std::abs(lhs.value - rhs.value);
  r.bound = lhs.error_bar + rhs.error_bar;
  return r;
}

IdentityResidual check_additivity(const std::vector<CertifiedSystem>& parts,
                                  const PositiveOperator& T, std::span<const double> xi,
                                  const IndexWindow& W, double ortho_tol) {
  // fiberwise orthogonality across parts
  std::vector<std::vector<FiberVector>> fibers(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p)
    for (const auto& g : parts[p].system.generators)
      fibers[p].push_back(fiber(g, xi, W));
  double cross = 0.0;
  for (std::size_t p = 0; p < parts.size(); ++p)
    for (std::size_t q = p + 1; q < parts.size(); ++q)
      for (const auto& a : fibers[p])
        for (const auto& b : fibers[q])
          cross = std::max(cross, std::abs(inner(a.values, b.values)));
  if (cross > ortho_tol)
    throw std::invalid_argument("check_additivity: subspaces are not fiberwise orthogonal");

  GeneratorSystem combined;
  combined.name = "union";
  combined.dim = W.dim();
  double sum = 0.0;
  double bound = 0.0;
  for (const auto& part : parts) {
    TraceValue v = local_trace(part, T, xi, W);
    sum += v.value;
    bound += v.error_bar;
    for (const auto& g : part.system.generators) combined.generators.push_back(g);
  }
  CertifiedSystem whole = CertifiedSystem::unchecked(
      std::move(combined), "orthogonal union of certified families");
  TraceValue lhs = local_trace(whole, T, xi, W);

  IdentityResidual r;
  r.lhs = lhs.value;
  r.rhs = sum;
  r.residual = std::abs(lhs.value - sum);
  r.bound = lhs.error_bar + bound;
  return r;
}

MonotonyReport check_monotony(const CertifiedSystem& smaller, const CertifiedSystem& bigger,
                              const Grid& grid, const IndexWindow& W, std::size_t random_probes,
                              std::uint64_t seed) {
  MonotonyReport rep;
  std::vector<VecXcd> probes;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < W.size(); ++i) {
    VecXcd d = VecXcd::Zero(static_cast<Eigen::Index>(W.size()));
    d[static_cast<Eigen::Index>(i)] = cplx{1.0, 0.0};
    probes.push_back(std::move(d));
    auto k = W.at(i);
    std::string label = "delta(";
    for (std::size_t c = 0; c < k.size(); ++c)
      label += (c ? "," : "") + std::to_string(k[c]);
    labels.push_back(label + ")");
  }
  for (std::size_t i = 0; i < random_probes; ++i) {
    probes.push_back(random_unit_vector(W.size(), seed + i));
    labels.push_back("random#" + std::to_string(i));
  }
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      TraceValue a = restricted_trace(smaller, probes[pi], grid.point(gi), W);
      TraceValue b = restricted_trace(bigger, probes[pi], grid.point(gi), W);
      const double slack = a.error_bar + b.error_bar + 1e-12;
      const double gap = a.value - b.value - slack;
      if (gap > rep.worst_gap) {
        rep.worst_gap = gap;
        rep.pass = false;
        rep.witness_xi = to_vec(grid.point(gi));
        rep.witness_probe = labels[pi];
      }
    }
  }
  return rep;
}

IdentityResidual check_modulation(const CertifiedSystem& sys, std::span<const double> a,
                                  const PositiveOperator& T, const Grid& grid,
                                  const IndexWindow& W, double certify_tol) {
  GeneratorSystem modded = modulate(sys.system, a);
  CertifiedSystem mod_cert =
      certify_system(modded, grid, W, certify_tol, CertifyMode::Projection);
  if (mod_cert.certificate.verdict == Verdict::Fail)
    throw std::invalid_argument("check_modulation: modulated system failed certification");

  IdentityResidual r;
  std::vector<double> shifted(a.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto xi = grid.point(i);
    for (std::size_t d = 0; d < a.size(); ++d) shifted[d] = xi[d] - a[d];
    TraceValue lhs = local_trace(mod_cert, T, xi, W);
    TraceValue rhs = local_trace(sys, T, shifted, W);
    const double res = std::abs(lhs.value - rhs.value);
    if (res > r.residual) {
      r.residual = res;
      r.lhs = lhs.value;
      r.rhs = rhs.value;
    }
    r.bound = std::max(r.bound, lhs.error_bar + rhs.error_bar);
  }
  return r;
}

GeneratorSystem dilated_system(const GeneratorSystem& sys, const DilationMatrix& A) {
  if (sys.dim != A.dim()) throw std::invalid_argument("dilated_system: dimension mismatch");
  const CosetSet cosets = coset_representatives(A.transposed());  // Z^n / A Z^n
  const MatXd AtInv = A.transposed().as_real().inverse();
  const double root_det = std::sqrt(std::abs(static_cast<double>(A.determinant())));
  const double expansion = A.transposed().as_real().cwiseAbs().rowwise().sum().maxCoeff();

  GeneratorSystem out;
  out.name = sys.name + "#dilated";
  out.dim = sys.dim;
  out.claimed_role = sys.claimed_role;
  for (const auto& g : sys.generators) {
    for (const auto& rep : cosets.representatives) {
      DecayEnvelope env = g.envelope();
      env.C *= std::pow(std::max(1.0, expansion), env.p) / root_det;
      if (std::isfinite(env.support_radius)) env.support_radius *= expansion;
      env.zero_radius = 0.0;
      env.vm_order = 0.0;
      env.vm_coeff = 0.0;
      GeneratorSpectrum base = g;
      MatXd M = AtInv;
      std::vector<double> l(rep.size());
      for (std::size_t c = 0; c < rep.size(); ++c) l[c] = static_cast<double>(rep[c]);
      auto eval = [base, M, l, root_det](std::span<const double> xi) -> cplx {
        VecXd arg = M * to_vec(xi);
        double phase = 0.0;
        for (Eigen::Index i = 0; i < arg.size(); ++i)
          phase -= l[static_cast<std::size_t>(i)] * arg[i];
        std::span<const double> arg_span{arg.data(), static_cast<std::size_t>(arg.size())};
        return base.evaluate(arg_span) * std::polar(1.0 / root_det, phase);
      };
      std::string rep_name;
      for (std::size_t c = 0; c < rep.size(); ++c)
        rep_name += (c ? "," : "") + std::to_string(rep[c]);
      out.generators.emplace_back(g.name() + "#D[" + rep_name + "]", sys.dim, std::move(eval),
                                  env, g.smoothness_note());
    }
  }
  return out;
}

IdentityResidual check_dilation(const CertifiedSystem& sys, const DilationMatrix& A,
                                const PositiveOperator& T, std::span<const double> xi,
                                const IndexWindow& W, double certify_tol) {
  const Grid probe = Grid::from_points(W.dim(), std::vector<double>(xi.begin(), xi.end()));
  if (!is_quasi_orthogonal(sys.system, probe, W, 1e-6))
    throw std::invalid_argument(
        "check_dilation: input family is not quasi-orthogonal at this point; "
        "quasi-orthogonalize first");

  // Left route: the dilated space through its own generator family.
  GeneratorSystem dil = dilated_system(sys.system, A);
  CertifiedSystem dil_cert = certify_system(dil, probe, W, certify_tol, CertifyMode::Projection);
  if (dil_cert.certificate.verdict == Verdict::Fail)
    throw internal_error("check_dilation: dilated family failed certification");
  TraceValue lhs = local_trace(dil_cert, T, xi, W);

  // Right route: coset sum of conjugated traces of the original space.
  const CosetSet cosets = coset_representatives(A);  // Z^n / A^T Z^n
  const MatXd AtInv = A.transposed().as_real().inverse();
  double rhs = 0.0;
  double rhs_bound = 0.0;
  for (const auto& d : cosets.representatives) {
    PositiveOperator conj = conjugate_by_embed(T, d, A, W);
    VecXd arg(static_cast<Eigen::Index>(xi.size()));
    for (std::size_t i = 0; i < xi.size(); ++i)
      arg[static_cast<Eigen::Index>(i)] = xi[i] + two_pi * static_cast<double>(d[i]);
    VecXd mapped = AtInv * arg;
    std::span<const double> mapped_span{mapped.data(), static_cast<std::size_t>(mapped.size())};
    TraceValue t = local_trace(sys, conj, mapped_span, W);
    rhs += t.value;
    rhs_bound += t.error_bar;
  }

  IdentityResidual r;
  r.lhs = lhs.value;
  r.rhs = rhs;
  r.residual = std::abs(lhs.value - rhs);
  r.bound = lhs.error_bar + rhs_bound;
  return r;
}

bool is_quasi_orthogonal(const GeneratorSystem& sys, const Grid& probe, const IndexWindow& W,
                         double tol) {
  for (std::size_t i = 0; i < probe.size(); ++i) {
    std::vector<FiberVector> fs;
    for (const auto& g : sys.generators) fs.push_back(fiber(g, probe.point(i), W));
    for (std::size_t a = 0; a < fs.size(); ++a) {
      const double per = fs[a].norm_sq();
      const double slack = tol + fs[a].tail_bound;
      if (std::min(std::abs(per), std::abs(per - 1.0)) > slack) return false;
      for (std::size_t b = a + 1; b < fs.size(); ++b)
        if (std::abs(inner(fs[a].values, fs[b].values)) >
            tol + std::sqrt(fs[a].tail_bound * fs[b].tail_bound) +
                std::sqrt(fs[a].norm_sq() * fs[b].tail_bound) +
                std::sqrt(fs[b].norm_sq() * fs[a].tail_bound))
          return false;
    }
  }
  return true;
}

MonotoneConvergenceReport check_monotone_convergence(const std::vector<CertifiedSystem>& chain,
                                                     const Grid& grid, const IndexWindow& W,
                                                     const std::vector<double>& limit_profile) {
  if (limit_profile.size() != grid.size())
    throw std::invalid_argument("check_monotone_convergence: limit profile size mismatch");
  MonotoneConvergenceReport rep;
  for (const auto& sys : chain) rep.profiles.push_back(spectral_function(sys, grid, W));
  for (std::size_t j = 0; j + 1 < rep.profiles.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double slack =
          rep.profiles[j].error_bars[i] + rep.profiles[j + 1].error_bars[i] + 1e-12;
      if (rep.profiles[j].values[i] > rep.profiles[j + 1].values[i] + slack) {
        rep.monotone = false;
        if (!rep.violation) rep.violation = {j, i};
      }
    }
  }
  for (const auto& prof : rep.profiles) {
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      gap += std::abs(prof.values[i] - limit_profile[i]) * grid.cell_volume();
    rep.l1_gaps.push_back(gap);
  }
  return rep;
}

}  // namespace sitrace
