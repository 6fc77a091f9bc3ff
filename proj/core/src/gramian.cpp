#include "sitrace/gramian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sitrace {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "FAIL";
}

std::string to_string(CertifyMode m) {
  switch (m) {
    case CertifyMode::Projection: return "projection";
    case CertifyMode::Delta: return "delta";
    case CertifyMode::GramianMatch: return "gramian-match";
  }
  return "projection";
}

CertifiedSystem CertifiedSystem::unchecked(GeneratorSystem sys, std::string reason) {
  CertifiedSystem out;
  out.system = std::move(sys);
  out.certificate.verdict = Verdict::Pass;
  out.certificate.unchecked = true;
  out.certificate.note = std::move(reason);
  return out;
}

namespace {

std::vector<FiberVector> all_fibers(const GeneratorSystem& sys, std::span<const double> xi,
                                    const IndexWindow& W) {
  std::vector<FiberVector> fs;
  fs.reserve(sys.generators.size());
  for (const auto& g : sys.generators) fs.push_back(fiber(g, xi, W));
  return fs;
}

VecXd to_vec(std::span<const double> xi) {
  VecXd v(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t i = 0; i < xi.size(); ++i) v[static_cast<Eigen::Index>(i)] = xi[i];
  return v;
}

// Operator-norm bound on the truncation error of the dual Gramian: for each
// generator, || f f^H - f_w f_w^H || <= 2 ||f_w|| sqrt(t) + t.
double dual_gramian_tail(const std::vector<FiberVector>& fs) {
  double e = 0.0;
  for (const auto& f : fs) {
    const double t = f.tail_bound;
    e += 2.0 * std::sqrt(f.norm_sq()) * std::sqrt(t) + t;
  }
  return e;
}

}  // namespace

FiberGramian gramian(const GeneratorSystem& sys, std::span<const double> xi,
                     const IndexWindow& W) {
  const auto fs = all_fibers(sys, xi, W);
  const Eigen::Index L = static_cast<Eigen::Index>(fs.size());
  FiberGramian G;
  G.xi = to_vec(xi);
  G.matrix.resize(L, L);
  for (Eigen::Index i = 0; i < L; ++i)
    for (Eigen::Index j = 0; j < L; ++j)
      G.matrix(i, j) = inner(fs[static_cast<std::size_t>(i)].values,
                             fs[static_cast<std::size_t>(j)].values);
  for (const auto& f : fs) G.tail_bound += f.tail_bound;
  return G;
}

FiberDualGramian dual_gramian(const GeneratorSystem& sys, std::span<const double> xi,
                              const IndexWindow& W) {
  const auto fs = all_fibers(sys, xi, W);
  FiberDualGramian D;
  D.xi = to_vec(xi);
  const Eigen::Index m = static_cast<Eigen::Index>(W.size());
  D.matrix = MatXcd::Zero(m, m);
  for (const auto& f : fs) D.matrix.noalias() += f.values * f.values.adjoint();
  D.tail_bound = dual_gramian_tail(fs);
  return D;
}

RangeProjection range_projection(const GeneratorSystem& sys, std::span<const double> xi,
                                 const IndexWindow& W, double tol) {
  FiberDualGramian D = dual_gramian(sys, xi, W);
  Eigen::SelfAdjointEigenSolver<MatXcd> es(D.matrix);
  const VecXd& ev = es.eigenvalues();
  const double top = ev.size() > 0 ? std::max(0.0, ev[ev.size() - 1]) : 0.0;
  const double cut = tol * std::max(top, 1.0);
  const double ambiguous_hi = std::sqrt(tol) * std::max(top, 1.0);

  RangeProjection P;
  P.xi = D.xi;
  P.matrix = MatXcd::Zero(D.matrix.rows(), D.matrix.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cut) {
      P.matrix.noalias() +=
          es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      ++P.rank;
    }
    if (ev[i] >= cut && ev[i] <= ambiguous_hi) P.ambiguous_eigenvalues.push_back(ev[i]);
  }
  return P;
}

RangeProjection range_projection(const CertifiedSystem& sys, std::span<const double> xi,
                                 const IndexWindow& W, double tol) {
  RangeProjection eig = range_projection(sys.system, xi, W, tol);
  if (!sys.certificate.passed()) return eig;
  FiberDualGramian D = dual_gramian(sys.system, xi, W);
  RangeProjection P;
  P.xi = D.xi;
  P.matrix = D.matrix;
  P.rank = eig.rank;
  P.ambiguous_eigenvalues = eig.ambiguous_eigenvalues;
  P.ntf_distance = (D.matrix - eig.matrix).cwiseAbs().maxCoeff();
  return P;
}

FrameBounds frame_bounds(const GeneratorSystem& sys, const Grid& grid, const IndexWindow& W,
                         double rank_tol) {
  FrameBounds out;
  std::vector<VecXd> spectra;
  spectra.reserve(grid.size());
  double global_max = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    FiberGramian G = gramian(sys, grid.point(i), W);
    Eigen::SelfAdjointEigenSolver<MatXcd> es(G.matrix, Eigen::EigenvaluesOnly);
    spectra.push_back(es.eigenvalues());
    if (es.eigenvalues().size() > 0)
      global_max = std::max(global_max, es.eigenvalues().maxCoeff());
  }
  if (global_max <= 0.0) {
    out.degenerate = true;
    return out;
  }
  const double cut = rank_tol * global_max;
  out.lower = std::numeric_limits<double>::infinity();
  out.upper = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    FrameBoundsRow row;
    row.xi = to_vec(grid.point(i));
    row.min_nonzero = std::numeric_limits<double>::infinity();
    row.max = 0.0;
    for (Eigen::Index j = 0; j < spectra[i].size(); ++j) {
      const double ev = spectra[i][j];
      row.max = std::max(row.max, ev);
      if (ev > cut) row.min_nonzero = std::min(row.min_nonzero, ev);
    }
    if (std::isfinite(row.min_nonzero)) out.lower = std::min(out.lower, row.min_nonzero);
    out.upper = std::max(out.upper, row.max);
    out.per_point.push_back(std::move(row));
  }
  if (!std::isfinite(out.lower)) out.degenerate = true;
  return out;
}

namespace {

struct PointResidual {
  double residual = 0.0;
  double tail = 0.0;
  double witness_eigenvalue = 0.0;
};

PointResidual projection_residual(const GeneratorSystem& sys, std::span<const double> xi,
                                  const IndexWindow& W) {
  FiberDualGramian D = dual_gramian(sys, xi, W);
  PointResidual r;
  r.tail = D.tail_bound;
  const MatXcd idem = D.matrix * D.matrix - D.matrix;
  r.residual = idem.cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<MatXcd> es(D.matrix, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    const double dist = std::min(std::abs(ev), std::abs(ev - 1.0));
    if (dist > r.residual) {
      r.residual = dist;
      r.witness_eigenvalue = ev;
    }
  }
  return r;
}

PointResidual delta_residual(const GeneratorSystem& sys, std::span<const double> xi,
                             const IndexWindow& W, double tol) {
  const auto fs = all_fibers(sys, xi, W);
  RangeProjection P = range_projection(sys, xi, W, tol);
  PointResidual r;
  for (const auto& f : fs) r.tail += 2.0 * std::sqrt(f.norm_sq() * f.tail_bound) + f.tail_bound;

  const auto zero = W.position(std::vector<std::int64_t>(static_cast<std::size_t>(W.dim()), 0));
  if (!zero) throw internal_error("window does not contain 0");
  const Eigen::Index o = static_cast<Eigen::Index>(*zero);
  const cplx alphas[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (std::size_t l = 0; l < W.size(); ++l) {
    const Eigen::Index li = static_cast<Eigen::Index>(l);
    if (li == o) continue;
    for (const cplx& a : alphas) {
      double lhs = 0.0;
      for (const auto& f : fs) lhs += std::norm(f.values[o] + std::conj(a) * f.values[li]);
      const double rhs = (P.matrix.col(o) + a * P.matrix.col(li)).squaredNorm();
      r.residual = std::max(r.residual, std::abs(lhs - rhs));
    }
  }
  return r;
}

PointResidual match_residual(const GeneratorSystem& sys, const GeneratorSystem& ref,
                             std::span<const double> xi, const IndexWindow& W) {
  FiberDualGramian a = dual_gramian(sys, xi, W);
  FiberDualGramian b = dual_gramian(ref, xi, W);
  PointResidual r;
  r.residual = (a.matrix - b.matrix).cwiseAbs().maxCoeff();
  r.tail = a.tail_bound + b.tail_bound;
  return r;
}

}  // namespace

Certificate certify_ntf(const GeneratorSystem& sys, const Grid& grid, const IndexWindow& W,
                        double tol, CertifyMode mode, const GeneratorSystem* reference) {
  if (mode == CertifyMode::GramianMatch && reference == nullptr)
    throw std::invalid_argument("certify_ntf: gramian-match mode requires a reference system");
  if (sys.dim != W.dim()) throw std::invalid_argument("certify_ntf: dimension mismatch");

  Certificate cert;
  cert.mode = mode;
  cert.tol = tol;
  cert.grid_points = grid.size();
  cert.window_radius = W.radius();
  bool any_fail = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PointResidual r;
    switch (mode) {
      case CertifyMode::Projection: r = projection_residual(sys, grid.point(i), W); break;
      case CertifyMode::Delta: r = delta_residual(sys, grid.point(i), W, tol); break;
      case CertifyMode::GramianMatch: r = match_residual(sys, *reference, grid.point(i), W); break;
    }
    if (r.residual > cert.max_residual) {
      cert.max_residual = r.residual;
      cert.worst_xi = to_vec(grid.point(i));
      cert.witness_eigenvalue = r.witness_eigenvalue;
    }
    cert.max_tail_bound = std::max(cert.max_tail_bound, r.tail);
    if (r.residual > tol) {
      if (r.residual <= r.tail)
        ++cert.inconclusive_points;
      else
        any_fail = true;
    }
  }
  if (any_fail)
    cert.verdict = Verdict::Fail;
  else if (cert.inconclusive_points > 0)
    cert.verdict = Verdict::Inconclusive;
  else
    cert.verdict = Verdict::Pass;
  return cert;
}

CertifiedSystem certify_system(const GeneratorSystem& sys, const Grid& grid,
                               const IndexWindow& W, double tol, CertifyMode mode) {
  CertifiedSystem out;
  out.system = sys;
  out.certificate = certify_ntf(sys, grid, W, tol, mode);
  return out;
}

Certificate full_space_check(const GeneratorSystem& sys, const Grid& grid, const IndexWindow& W,
                             double tol) {
  if (sys.dim != W.dim()) throw std::invalid_argument("full_space_check: dimension mismatch");
  Certificate cert;
  cert.mode = CertifyMode::Delta;
  cert.tol = tol;
  cert.grid_points = grid.size();
  cert.window_radius = W.radius();
  cert.note = "full-space generator equations";

  const auto zero = W.position(std::vector<std::int64_t>(static_cast<std::size_t>(W.dim()), 0));
  if (!zero) throw internal_error("window does not contain 0");
  const Eigen::Index o = static_cast<Eigen::Index>(*zero);

  bool any_fail = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto fs = all_fibers(sys, grid.point(i), W);
    double tail = 0.0;
    for (const auto& f : fs) tail += 2.0 * std::sqrt(f.norm_sq() * f.tail_bound) + f.tail_bound;

    double unit = 0.0;
    for (const auto& f : fs) unit += std::norm(f.values[o]);
    double residual = std::abs(unit - 1.0);
    for (std::size_t l = 0; l < W.size(); ++l) {
      const Eigen::Index li = static_cast<Eigen::Index>(l);
      if (li == o) continue;
      cplx s{0.0, 0.0};
      for (const auto& f : fs) s += f.values[o] * std::conj(f.values[li]);
      residual = std::max(residual, std::abs(s));
    }
    if (residual > cert.max_residual) {
      cert.max_residual = residual;
      cert.worst_xi = to_vec(grid.point(i));
    }
    cert.max_tail_bound = std::max(cert.max_tail_bound, tail);
    if (residual > tol) {
      if (residual <= tail)
        ++cert.inconclusive_points;
      else
        any_fail = true;
    }
  }
  if (any_fail)
    cert.verdict = Verdict::Fail;
  else if (cert.inconclusive_points > 0)
    cert.verdict = Verdict::Inconclusive;
  else
    cert.verdict = Verdict::Pass;
  return cert;
}

}  // namespace sitrace
