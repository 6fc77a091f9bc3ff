#include "sitrace/wavelet.hpp"

#include <algorithm>
#include <cmath>

namespace sitrace {

namespace {

VecXd to_vec(std::span<const double> xi) {
  VecXd v(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t i = 0; i < xi.size(); ++i) v[static_cast<Eigen::Index>(i)] = xi[i];
  return v;
}

// Cached powers of A^T and their inverse row-sum norms. ||(A^T)^(-j)||_inf
// controls both the growth of positive scales and the shrinkage of negative
// ones: |(A^T)^j v|_inf >= |v|_inf / inv_norm(j) and
// |(A^T)^(-j) v|_inf <= inv_norm(j) |v|_inf.
class ScaleLadder {
 public:
  explicit ScaleLadder(const DilationMatrix& A)
      : fwd_(A.transposed().as_real()), inv_(fwd_.inverse()) {
    pow_fwd_.push_back(MatXd::Identity(fwd_.rows(), fwd_.cols()));
    pow_inv_.push_back(MatXd::Identity(fwd_.rows(), fwd_.cols()));
  }

  VecXd map(int j, std::span<const double> xi) const {
    const MatXd& M = power(j);
    return M * to_vec(xi);
  }

  double inv_norm(int j) const {
    grow(static_cast<std::size_t>(j));
    return pow_inv_[static_cast<std::size_t>(j)].cwiseAbs().rowwise().sum().maxCoeff();
  }

  double fwd_norm(int j) const {
    grow(static_cast<std::size_t>(j));
    return pow_fwd_[static_cast<std::size_t>(j)].cwiseAbs().rowwise().sum().maxCoeff();
  }

 private:
  const MatXd& power(int j) const {
    grow(static_cast<std::size_t>(std::abs(j)));
    return j >= 0 ? pow_fwd_[static_cast<std::size_t>(j)] : pow_inv_[static_cast<std::size_t>(-j)];
  }
  void grow(std::size_t upto) const {
    while (pow_fwd_.size() <= upto) {
      pow_fwd_.push_back(fwd_ * pow_fwd_.back());
      pow_inv_.push_back(inv_ * pow_inv_.back());
    }
  }
  MatXd fwd_;
  MatXd inv_;
  mutable std::vector<MatXd> pow_fwd_;
  mutable std::vector<MatXd> pow_inv_;
};

std::span<const double> as_span(const VecXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

constexpr int kTailScanCap = 600;

// sum over j > J of sup|psi|^2 on |arg|_inf >= |xi|_inf / inv_norm(j)
double positive_scale_tail(const GeneratorSystem& psis, const ScaleLadder& ladder, int J,
                           double xi_inf) {
  double acc = 0.0;
  for (int j = J + 1; j < J + 1 + kTailScanCap; ++j) {
    const double r = xi_inf / ladder.inv_norm(j);
    double term = 0.0;
    for (const auto& psi : psis.generators) {
      const double b = psi.envelope().bound_beyond(r);
      term += b * b;
    }
    if (term == 0.0) return acc;
    acc += term;
    if (term < 1e-25 * (1.0 + acc)) return acc;
  }
  return acc * 2.0;  // scan cap hit; terms were still shrinking geometrically
}

struct NegTail {
  double value = 0.0;
  bool warn = false;
};

// sum over j > J of sup|psi|^2 on |arg|_inf <= inv_norm(j) |xi|_inf. Needs a
// vanishing-moment or zero-radius handle on the envelope; otherwise falls
// back to a geometric-ratio monitor on the last computed terms.
NegTail negative_scale_tail(const GeneratorSystem& psis, const ScaleLadder& ladder, int J,
                            std::span<const double> xi, double last, double prev) {
  NegTail out;
  bool rigorous = true;
  for (const auto& psi : psis.generators) {
    const DecayEnvelope& e = psi.envelope();
    if (e.zero_radius <= 0.0 && e.vm_order <= 0.0) rigorous = false;
  }
  if (rigorous) {
    const double xi_inf = max_abs_norm(xi);
    for (int j = J + 1; j < J + 1 + kTailScanCap; ++j) {
      const double r = ladder.inv_norm(j) * xi_inf;
      double term = 0.0;
      for (const auto& psi : psis.generators) {
        const double b = psi.envelope().bound_within(r);
        term += b * b;
      }
      if (term == 0.0) return out;
      out.value += term;
      if (term < 1e-25 * (1.0 + out.value)) return out;
    }
    out.value *= 2.0;
    return out;
  }
  if (prev > 0.0 && last < prev) {
    const double ratio = last / prev;
    out.value = 10.0 * last * ratio / (1.0 - ratio);
  } else if (last > 0.0) {
    out.warn = true;
    out.value = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace

WaveletSystem WaveletSystem::make(GeneratorSystem psis, DilationMatrix dilation, int scale_depth,
                                  bool semiorthogonal) {
  if (!dilation.expansive())
    throw std::invalid_argument("wavelet system: dilation matrix must be expansive");
  if (scale_depth < 1) throw std::invalid_argument("wavelet system: scale depth must be >= 1");
  if (psis.dim != dilation.dim())
    throw std::invalid_argument("wavelet system: dimension mismatch");
  WaveletSystem ws;
  ws.psis = std::move(psis);
  ws.dilation = std::move(dilation);
  ws.scale_depth = scale_depth;
  ws.claimed_semiorthogonal = semiorthogonal;
  return ws;
}

CalibrationValue calibration_sum(const WaveletSystem& ws, std::span<const double> xi,
                                 int depth) {
  const int J = depth < 0 ? ws.scale_depth : depth;
  const ScaleLadder ladder(ws.dilation);
  CalibrationValue out;
  double neg_last = 0.0, neg_prev = 0.0;
  for (int j = -J; j <= J; ++j) {
    VecXd arg = ladder.map(j, xi);
    double term = 0.0;
    for (const auto& psi : ws.psis.generators) term += std::norm(psi.evaluate(as_span(arg)));
    out.value += term;
    if (j == -J) neg_last = term;
    if (j == -J + 1) neg_prev = term;
  }
  out.tail = positive_scale_tail(ws.psis, ladder, J, max_abs_norm(xi));
  NegTail nt = negative_scale_tail(ws.psis, ladder, J, xi, neg_last, neg_prev);
  out.tail += nt.value;
  out.tail_warning = nt.warn || !std::isfinite(out.tail);
  return out;
}

TranslateValue translate_sum(const WaveletSystem& ws, std::span<const std::int64_t> s,
                             std::span<const double> xi, int depth) {
  bool zero = true;
  for (std::int64_t c : s)
    if (c != 0) zero = false;
  if (zero || in_sublattice(s, ws.dilation))
    throw std::invalid_argument("translate_sum: s must lie outside the adjoint sublattice");
  const int J = depth < 0 ? ws.scale_depth : depth;
  const ScaleLadder ladder(ws.dilation);
  std::vector<double> shifted(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    shifted[i] = xi[i] + two_pi * static_cast<double>(s[i]);

  TranslateValue out;
  for (int j = 0; j <= J; ++j) {
    VecXd a = ladder.map(j, xi);
    VecXd b = ladder.map(j, shifted);
    for (const auto& psi : ws.psis.generators)
      out.value += psi.evaluate(as_span(a)) * std::conj(psi.evaluate(as_span(b)));
  }
  const double xa = max_abs_norm(xi);
  const double xb = max_abs_norm(shifted);
  for (int j = J + 1; j < J + 1 + kTailScanCap; ++j) {
    const double n = ladder.inv_norm(j);
    double term = 0.0;
    for (const auto& psi : ws.psis.generators)
      term += psi.envelope().bound_beyond(xa / n) * psi.envelope().bound_beyond(xb / n);
    if (term == 0.0) break;
    out.tail += term;
    if (term < 1e-25 * (1.0 + out.tail)) break;
  }
  return out;
}

WaveletCertificate characterize_ntf_wavelet(const WaveletSystem& ws, const Grid& grid,
                                            int s_range, double tol) {
  WaveletCertificate cert;
  cert.summary.mode = CertifyMode::Projection;
  cert.summary.tol = tol;
  cert.summary.grid_points = grid.size();
  cert.summary.note = "wavelet characterization";

  // translate offsets outside the adjoint sublattice
  std::vector<std::vector<std::int64_t>> offsets;
  {
    const IndexWindow box(ws.psis.dim, std::max(1, s_range));
    for (std::size_t i = 0; i < box.size(); ++i) {
      auto s = box.at(i);
      bool zero = true;
      for (std::int64_t c : s)
        if (c != 0) zero = false;
      if (zero) continue;
      std::vector<std::int64_t> v(s.begin(), s.end());
      if (!in_sublattice(v, ws.dilation)) offsets.push_back(std::move(v));
    }
  }

  bool any_fail = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto xi = grid.point(i);
    CalibrationValue cal = calibration_sum(ws, xi);
    ResidualRow row;
    row.xi = to_vec(xi);
    row.equation = "calibration";
    row.residual = std::abs(cal.value - 1.0);
    row.tail = cal.tail;
    cert.rows.push_back(row);

    auto account = [&](const ResidualRow& r) {
      if (r.residual > cert.summary.max_residual) {
        cert.summary.max_residual = r.residual;
        cert.summary.worst_xi = r.xi;
        cert.summary.note = "worst equation: " + r.equation;
      }
      cert.summary.max_tail_bound = std::max(cert.summary.max_tail_bound, r.tail);
      if (r.residual > tol) {
        if (r.residual <= r.tail)
          ++cert.summary.inconclusive_points;
        else
          any_fail = true;
      }
    };
    account(row);

    for (const auto& s : offsets) {
      TranslateValue t = translate_sum(ws, s, xi);
      ResidualRow r;
      r.xi = to_vec(xi);
      r.equation = "orthogonality:s=";
      for (std::size_t c = 0; c < s.size(); ++c)
        r.equation += (c ? "," : "") + std::to_string(s[c]);
      r.residual = std::abs(t.value);
      r.tail = t.tail;
      cert.rows.push_back(r);
      account(r);
    }
  }
  if (any_fail)
    cert.summary.verdict = Verdict::Fail;
  else if (cert.summary.inconclusive_points > 0)
    cert.summary.verdict = Verdict::Inconclusive;
  else
    cert.summary.verdict = Verdict::Pass;
  return cert;
}

std::vector<QuasiAffineFiber> quasi_affine_fibers(const WaveletSystem& ws,
                                                  std::span<const double> xi,
                                                  const IndexWindow& W, int depth) {
  if (!ws.claimed_semiorthogonal)
    throw std::invalid_argument("quasi_affine_fibers: requires a semiorthogonal claim");
  const int J = depth < 0 ? ws.scale_depth : depth;
  const ScaleLadder ladder(ws.dilation);
  const double xi_inf = max_abs_norm(xi);
  std::vector<QuasiAffineFiber> out;
  std::vector<double> arg(xi.size());
  for (int j = 1; j <= J; ++j) {
    for (std::size_t p = 0; p < ws.psis.generators.size(); ++p) {
      const auto& psi = ws.psis.generators[p];
      QuasiAffineFiber qa;
      qa.scale = j;
      qa.psi_index = p;
      qa.fiber.values.resize(static_cast<Eigen::Index>(W.size()));
      for (std::size_t i = 0; i < W.size(); ++i) {
        auto k = W.at(i);
        for (std::size_t d = 0; d < arg.size(); ++d)
          arg[d] = xi[d] + two_pi * static_cast<double>(k[d]);
        VecXd mapped = ladder.map(j, arg);
        qa.fiber.values[static_cast<Eigen::Index>(i)] = psi.evaluate(as_span(mapped));
      }
      qa.fiber.tail_bound =
          fiber_tail_sq(psi.envelope(), W.dim(), W.radius(), xi_inf, ladder.inv_norm(j));
      out.push_back(std::move(qa));
    }
  }
  return out;
}

TraceValue v0_trace(const WaveletSystem& ws, const PositiveOperator& T,
                    std::span<const double> xi, const IndexWindow& W, int depth) {
  if (T.size() != W.size()) throw std::invalid_argument("v0_trace: operator window mismatch");
  const int J = depth < 0 ? ws.scale_depth : depth;
  const auto fibers = quasi_affine_fibers(ws, xi, W, J);
  TraceValue out;
  double tail_sum = 0.0;
  double mass = 0.0;
  for (const auto& qa : fibers) {
    out.value += std::real(inner(T.matrix() * qa.fiber.values, qa.fiber.values));
    tail_sum += qa.fiber.tail_bound;
    mass += qa.fiber.norm_sq() + qa.fiber.tail_bound;
  }
  // remaining scales j > J
  const ScaleLadder ladder(ws.dilation);
  double scale_tail = 0.0;
  for (int j = J + 1; j < J + 1 + kTailScanCap; ++j) {
    double term = 0.0;
    for (const auto& psi : ws.psis.generators)
      term += lattice_sum_sq(psi.envelope(), W.dim(), xi, ladder.inv_norm(j));
    if (term == 0.0) break;
    scale_tail += term;
    if (term < 1e-25 * (1.0 + scale_tail)) break;
  }
  out.error_bar = T.beyond_window_norm() * tail_sum + T.trunc_error() * mass +
                  T.norm_bound() * scale_tail;
  return out;
}

TraceProfile wavelet_dimension_function(const WaveletSystem& ws, const Grid& grid,
                                        const IndexWindow& W, int depth) {
  const int J = depth < 0 ? ws.scale_depth : depth;
  const ScaleLadder ladder(ws.dilation);
  TraceProfile prof;
  prof.grid = grid;
  prof.provenance = "scale-lattice sum";
  prof.values.resize(grid.size());
  prof.error_bars.resize(grid.size());
  std::vector<double> arg(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto xi = grid.point(i);
    const double xi_inf = max_abs_norm(xi);
    double total = 0.0;
    double err = 0.0;
    for (int j = 1; j <= J; ++j) {
      for (std::size_t w = 0; w < W.size(); ++w) {
        auto k = W.at(w);
        for (std::size_t d = 0; d < arg.size(); ++d)
          arg[d] = xi[d] + two_pi * static_cast<double>(k[d]);
        VecXd mapped = ladder.map(j, arg);
        for (const auto& psi : ws.psis.generators)
          total += std::norm(psi.evaluate(as_span(mapped)));
      }
      for (const auto& psi : ws.psis.generators)
        err += fiber_tail_sq(psi.envelope(), W.dim(), W.radius(), xi_inf, ladder.inv_norm(j));
    }
    for (int j = J + 1; j < J + 1 + kTailScanCap; ++j) {
      double term = 0.0;
      for (const auto& psi : ws.psis.generators)
        term += lattice_sum_sq(psi.envelope(), W.dim(), xi, ladder.inv_norm(j));
      if (term == 0.0) break;
      err += term;
      if (term < 1e-25 * (1.0 + err)) break;
    }
    prof.values[i] = total;
    prof.error_bars[i] = err;
  }
  return prof;
}

Certificate scaling_wavelet_match(const WaveletSystem& ws, const GeneratorSystem& scaling,
                                  const Grid& grid, int s_range, double tol) {
  if (!ws.claimed_semiorthogonal)
    throw std::invalid_argument("scaling_wavelet_match: requires a semiorthogonal claim");
  const int J = ws.scale_depth;
  const ScaleLadder ladder(ws.dilation);
  Certificate cert;
  cert.tol = tol;
  cert.grid_points = grid.size();
  cert.note = "scaling-wavelet translate match";

  const IndexWindow box(ws.psis.dim, std::max(1, s_range));
  bool any_fail = false;
  std::vector<double> shifted(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto xi = grid.point(i);
    const double xa = max_abs_norm(xi);
    for (std::size_t b = 0; b < box.size(); ++b) {
      auto s = box.at(b);
      for (std::size_t d = 0; d < shifted.size(); ++d)
        shifted[d] = xi[d] + two_pi * static_cast<double>(s[d]);
      cplx lhs{0.0, 0.0};
      for (int j = 1; j <= J; ++j) {
        VecXd u = ladder.map(j, xi);
        VecXd v = ladder.map(j, shifted);
        for (const auto& psi : ws.psis.generators)
          lhs += psi.evaluate(as_span(u)) * std::conj(psi.evaluate(as_span(v)));
      }
      cplx rhs{0.0, 0.0};
      for (const auto& phi : scaling.generators)
        rhs += phi.evaluate(xi) * std::conj(phi.evaluate(shifted));
      double tail = 0.0;
      const double xb = max_abs_norm(shifted);
      for (int j = J + 1; j < J + 1 + kTailScanCap; ++j) {
        const double n = ladder.inv_norm(j);
        double term = 0.0;
        for (const auto& psi : ws.psis.generators)
          term += psi.envelope().bound_beyond(xa / n) * psi.envelope().bound_beyond(xb / n);
        if (term == 0.0) break;
        tail += term;
        if (term < 1e-25 * (1.0 + tail)) break;
      }
      const double residual = std::abs(lhs - rhs);
      if (residual > cert.max_residual) {
        cert.max_residual = residual;
        cert.worst_xi = to_vec(xi);
        std::string sv;
        for (std::size_t c = 0; c < s.size(); ++c) sv += (c ? "," : "") + std::to_string(s[c]);
        cert.note = "scaling-wavelet translate match; worst s=" + sv;
      }
      cert.max_tail_bound = std::max(cert.max_tail_bound, tail);
      if (residual > tol) {
        if (residual <= tail)
          ++cert.inconclusive_points;
        else
          any_fail = true;
      }
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

Certificate mra_consistency(const WaveletSystem& ws, const GeneratorSystem& scaling,
                            const Grid& grid, int s_range, double tol) {
  const ScaleLadder ladder(ws.dilation);
  Certificate cert;
  cert.tol = tol;
  cert.grid_points = grid.size();
  cert.note = "single-scale wavelet/scaling relations";

  std::vector<std::vector<std::int64_t>> offsets;
  {
    const IndexWindow box(ws.psis.dim, std::max(1, s_range));
    for (std::size_t i = 0; i < box.size(); ++i) {
      auto s = box.at(i);
      bool zero = true;
      for (std::int64_t c : s)
        if (c != 0) zero = false;
      if (zero) continue;
      std::vector<std::int64_t> v(s.begin(), s.end());
      if (!in_sublattice(v, ws.dilation)) offsets.push_back(std::move(v));
    }
  }

  bool any_fail = false;
  std::vector<double> shifted(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto xi = grid.point(i);
    VecXd half = ladder.map(-1, xi);

    double lhs = 0.0;
    for (const auto& psi : ws.psis.generators) lhs += std::norm(psi.evaluate(xi));
    double rhs = 0.0;
    for (const auto& phi : scaling.generators)
      rhs += std::norm(phi.evaluate(as_span(half))) - std::norm(phi.evaluate(xi));
    double residual = std::abs(lhs - rhs);

    for (const auto& s : offsets) {
      for (std::size_t d = 0; d < shifted.size(); ++d)
        shifted[d] = xi[d] + two_pi * static_cast<double>(s[d]);
      cplx wsum{0.0, 0.0};
      for (const auto& psi : ws.psis.generators)
        wsum += psi.evaluate(xi) * std::conj(psi.evaluate(shifted));
      cplx ssum{0.0, 0.0};
      for (const auto& phi : scaling.generators)
        ssum += phi.evaluate(xi) * std::conj(phi.evaluate(shifted));
      residual = std::max(residual, std::abs(wsum + ssum));
    }
    if (residual > cert.max_residual) {
      cert.max_residual = residual;
      cert.worst_xi = to_vec(xi);
    }
    if (residual > tol) any_fail = true;
  }
  cert.verdict = any_fail ? Verdict::Fail : Verdict::Pass;
  return cert;
}

GeneratorSystem quasi_affine_generator_system(const WaveletSystem& ws, int depth) {
  const int J = depth < 0 ? ws.scale_depth : depth;
  const ScaleLadder ladder(ws.dilation);
  GeneratorSystem out;
  out.name = ws.psis.name + "#quasi-affine";
  out.dim = ws.psis.dim;
  out.claimed_role = SystemRole::NtfGenerator;
  for (int j = 1; j <= J; ++j) {
    const MatXd M = ws.dilation.transposed().as_real();
    MatXd Mj = MatXd::Identity(M.rows(), M.cols());
    for (int t = 0; t < j; ++t) Mj = M * Mj;
    const double inv_n = ladder.inv_norm(j);
    const double fwd_n = ladder.fwd_norm(j);
    for (const auto& psi : ws.psis.generators) {
      DecayEnvelope env = psi.envelope();
      if (std::isfinite(env.support_radius)) env.support_radius *= inv_n;
      env.zero_radius = env.zero_radius / std::max(fwd_n, 1.0);
      env.vm_order = 0.0;
      env.vm_coeff = 0.0;
      GeneratorSpectrum base = psi;
      auto eval = [base, Mj](std::span<const double> xi) -> cplx {
        VecXd mapped = Mj * to_vec(xi);
        return base.evaluate(as_span(mapped));
      };
      out.generators.emplace_back(psi.name() + "#scale" + std::to_string(j), out.dim,
                                  std::move(eval), env, psi.smoothness_note());
    }
  }
  return out;
}

}  // namespace sitrace
