#include "sitrace/harness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sitrace {

namespace {

std::string vec_str(const VecXd& v) {
  std::string s = "xi=(";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + format_double(v[i]);
  return s + ")";
}

Verdict classify(double residual, double tol, double bound) {
  if (residual <= tol) return Verdict::Pass;
  if (residual <= bound) return Verdict::Inconclusive;
  return Verdict::Fail;
}

CheckResult from_certificate(const std::string& name, const std::string& system,
                             const Certificate& cert) {
  CheckResult r;
  r.name = name;
  r.system = system;
  r.verdict = cert.verdict;
  r.residual = cert.max_residual;
  r.bound = cert.max_tail_bound;
  if (cert.worst_xi.size() > 0) r.witness = vec_str(cert.worst_xi);
  if (!cert.note.empty()) r.witness += (r.witness.empty() ? "" : "; ") + cert.note;
  return r;
}

DilationMatrix dilation_from_config(const RunConfig& cfg) {
  std::size_t n = 1;
  while (n * n < cfg.dilation.size()) ++n;
  return DilationMatrix::from_entries(static_cast<int>(n), cfg.dilation);
}

WaveletSystem wavelet_from_config(const RunConfig& cfg, const std::string& selector) {
  GeneratorSystem psis = load_system(cfg, selector);
  DilationMatrix A = dilation_from_config(cfg);
  return WaveletSystem::make(std::move(psis), std::move(A), cfg.depth);
}

std::size_t per_axis_points(const RunConfig& cfg, int dim) {
  if (dim <= 1) return cfg.grid;
  std::size_t per = 1;
  while ((per + 1) * (per + 1) <= cfg.grid) ++per;
  return std::max<std::size_t>(per, 2);
}

// Random PSD operator supported on the interior of the window so that shift
// conjugations up to `margin` drop nothing.
PositiveOperator interior_psd_operator(const IndexWindow& W, int margin, std::uint64_t seed) {
  const int inner_radius = std::max(1, W.radius() - margin);
  const IndexWindow inner(W.dim(), inner_radius);
  PositiveOperator small = random_psd_operator(inner, seed);
  MatXcd big = MatXcd::Zero(static_cast<Eigen::Index>(W.size()),
                            static_cast<Eigen::Index>(W.size()));
  for (std::size_t r = 0; r < inner.size(); ++r) {
    const auto R = W.position(inner.at(r));
    for (std::size_t c = 0; c < inner.size(); ++c) {
      const auto C = W.position(inner.at(c));
      big(static_cast<Eigen::Index>(*R), static_cast<Eigen::Index>(*C)) =
          small.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return PositiveOperator(std::move(big), small.norm_bound(), 0.0, 0.0);
}

}  // namespace

GeneratorSystem load_system(const RunConfig& cfg, const std::string& selector) {
  GeneratorSystem sys = catalog_get(selector, user_spectra(cfg));
  if (cfg.perturb > 0.0 && !sys.generators.empty()) {
    const double eps = cfg.perturb;
    GeneratorSpectrum base = sys.generators[0];
    DecayEnvelope env = base.envelope();
    env.C += eps;
    env.support_radius = std::max(env.support_radius, pi);
    env.zero_radius = 0.0;
    env.vm_order = 0.0;
    auto eval = [base, eps](std::span<const double> xi) -> cplx {
      double s = 0.0;
      for (double x : xi) s += x;
      const cplx bump =
          max_abs_norm(xi) <= pi ? cplx{eps * std::cos(s), 0.0} : cplx{0.0, 0.0};
      return base.evaluate(xi) + bump;
    };
    sys.generators[0] =
        GeneratorSpectrum(base.name() + "#perturbed", base.dim(), std::move(eval), env);
    sys.name += "#perturbed";
  }
  return sys;
}

GeneratorSystem paley_wiener_system(double cut) {
  if (!(cut > 0.0)) throw std::invalid_argument("paley_wiener_system: cut must be positive");
  GeneratorSystem sys;
  sys.name = "paley-wiener:" + format_double(cut);
  sys.dim = 1;
  sys.claimed_role = SystemRole::NtfGenerator;
  double lo = -cut;
  int piece = 0;
  while (lo < cut) {
    const double hi = std::min(lo + two_pi, cut);
    DecayEnvelope env{1.0, 0.0, cut};
    const double a = lo, b = hi;
    auto eval = [a, b](std::span<const double> xi) -> cplx {
      return (xi[0] >= a && xi[0] < b) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    };
    sys.generators.emplace_back(sys.name + "#band" + std::to_string(piece++), 1, std::move(eval),
                                env, "indicator");
    lo = hi;
  }
  return sys;
}

AnalyzeResult run_analyze(const RunConfig& cfg) {
  AnalyzeResult res;
  res.report.config = cfg;
  if (cfg.system.empty()) throw config_error("config field 'system': required for analyze");

  GeneratorSystem sys = load_system(cfg, cfg.system);
  const IndexWindow W(sys.dim, cfg.window);
  const Grid grid = fundamental_grid(sys.dim, per_axis_points(cfg, sys.dim));

  CertifiedSystem cert = cfg.unchecked
                             ? CertifiedSystem::unchecked(sys, "requested unchecked")
                             : certify_system(sys, grid, W, cfg.tol, CertifyMode::Projection);
  if (cert.certificate.verdict == Verdict::Fail && cfg.quasi_orthogonalize) {
    GeneratorSystem qo = quasi_orthogonalize(sys, W, cfg.tail_tol);
    cert = certify_system(qo, grid, W, cfg.tol, CertifyMode::Projection);
    cert.certificate.note = "after quasi-orthogonalization";
  }
  res.report.checks.push_back(
      from_certificate("certify", cert.system.name, cert.certificate));
  if (cert.certificate.verdict == Verdict::Fail) {
    res.exit_code = 3;
    return res;
  }

  res.dimension = dimension_function(cert, grid, W);
  const Grid wide = box_grid(sys.dim, per_axis_points(cfg, sys.dim), -two_pi, two_pi);
  res.spectral = spectral_function(cert, wide, W);
  res.frame = frame_bounds(cert.system, grid, W, cfg.rank_tol);

  CheckResult dim_row;
  dim_row.name = "dimension-function";
  dim_row.system = cert.system.name;
  dim_row.verdict = res.dimension.integer_deviation_flags.empty() ? Verdict::Pass : Verdict::Fail;
  double dmax = 0.0;
  for (std::size_t i = 0; i < res.dimension.values.size(); ++i)
    dmax = std::max(dmax,
                    std::abs(res.dimension.values[i] - std::round(res.dimension.values[i])));
  dim_row.residual = dmax;
  dim_row.bound = 1e-6;
  dim_row.witness = "near-integer deviation";
  res.report.checks.push_back(dim_row);

  CheckResult spec_row;
  spec_row.name = "spectral-function";
  spec_row.system = cert.system.name;
  double smax = 0.0;
  double sbad = 0.0;
  for (std::size_t i = 0; i < res.spectral.values.size(); ++i) {
    smax = std::max(smax, res.spectral.values[i]);
    sbad = std::max(sbad, std::max(0.0, res.spectral.values[i] - 1.0) +
                              std::max(0.0, -res.spectral.values[i]));
  }
  spec_row.verdict = sbad <= 1e-9 ? Verdict::Pass : Verdict::Fail;
  spec_row.residual = sbad;
  spec_row.bound = 1e-9;
  spec_row.witness = "range check 0 <= sigma <= 1; max value " + format_double(smax);
  res.report.checks.push_back(spec_row);

  res.exit_code = 0;
  return res;
}

VerifyResult run_verify(const RunConfig& cfg) {
  VerifyResult res;
  res.report.config = cfg;
  const std::string& check = cfg.check;

  if (check == "ntf") {
    GeneratorSystem sys = load_system(cfg, cfg.system);
    const IndexWindow W(sys.dim, cfg.window);
    const Grid grid = fundamental_grid(sys.dim, per_axis_points(cfg, sys.dim));
    Certificate cert = certify_ntf(sys, grid, W, cfg.tol, CertifyMode::Projection);
    res.report.checks.push_back(from_certificate("verify-ntf", sys.name, cert));
  } else if (check == "full-space") {
    GeneratorSystem sys;
    if (!cfg.wavelet.empty()) {
      WaveletSystem ws = wavelet_from_config(cfg, cfg.wavelet);
      sys = quasi_affine_generator_system(ws, cfg.depth);
    } else {
      sys = load_system(cfg, cfg.system);
    }
    const IndexWindow W(sys.dim, std::min(cfg.window, cfg.s_range + 1));
    const Grid grid = fundamental_grid(sys.dim, per_axis_points(cfg, sys.dim));
    Certificate cert = full_space_check(sys, grid, W, cfg.tol);
    res.report.checks.push_back(from_certificate("verify-full-space", sys.name, cert));
  } else if (check == "wavelet") {
    const std::string sel = cfg.system.empty() ? cfg.wavelet : cfg.system;
    WaveletSystem ws = wavelet_from_config(cfg, sel);
    const Grid grid = fundamental_grid(ws.psis.dim, per_axis_points(cfg, ws.psis.dim));
    WaveletCertificate cert = characterize_ntf_wavelet(ws, grid, cfg.s_range, cfg.tol);
    res.rows = std::move(cert.rows);
    res.report.checks.push_back(from_certificate("verify-wavelet", sel, cert.summary));
  } else if (check == "scaling-match") {
    WaveletSystem ws = wavelet_from_config(cfg, cfg.wavelet);
    GeneratorSystem scaling = load_system(cfg, cfg.scaling);
    const Grid grid = fundamental_grid(ws.psis.dim, per_axis_points(cfg, ws.psis.dim));
    Certificate cert = scaling_wavelet_match(ws, scaling, grid, cfg.s_range, cfg.tol);
    res.report.checks.push_back(
        from_certificate("verify-scaling-match", ws.psis.name + "/" + scaling.name, cert));
  } else if (check == "mra") {
    WaveletSystem ws = wavelet_from_config(cfg, cfg.wavelet);
    GeneratorSystem scaling = load_system(cfg, cfg.scaling);
    const Grid grid = fundamental_grid(ws.psis.dim, per_axis_points(cfg, ws.psis.dim));
    Certificate cert = mra_consistency(ws, scaling, grid, cfg.s_range, cfg.tol);
    res.report.checks.push_back(
        from_certificate("verify-mra", ws.psis.name + "/" + scaling.name, cert));
  } else {
    throw config_error("config field 'check': expected one of ntf, full-space, wavelet, "
                       "scaling-match, mra");
  }

  switch (res.report.checks.back().verdict) {
    case Verdict::Pass: res.exit_code = 0; break;
    case Verdict::Fail: res.exit_code = 1; break;
    case Verdict::Inconclusive: res.exit_code = 4; break;
  }
  return res;
}

PropertiesResult run_properties(const RunConfig& cfg) {
  PropertiesResult res;
  res.report.config = cfg;
  auto& checks = res.report.checks;
  const double tol = cfg.tol;

  const IndexWindow W1(1, std::min(cfg.window, 16));
  const IndexWindow W2(2, 4);
  const Grid grid1 = fundamental_grid(1, cfg.grid);
  const Grid grid2 = fundamental_grid(2, per_axis_points(cfg, 2));

  // Exactly representable systems: every fiber window is exact, so the
  // 1e-9 class residuals are meaningful. Slow-decay systems (haar, bspline)
  // are exercised in the verify paths where error bars carry the truncation.
  GeneratorSystem shannon = load_system(cfg, "shannon-scaling");
  GeneratorSystem shannon_w = load_system(cfg, "shannon-wavelet");
  GeneratorSystem meyer = load_system(cfg, "meyer-scaling");
  GeneratorSystem meyer_w = load_system(cfg, "meyer-wavelet");
  GeneratorSystem tensor2 = load_system(cfg, "tensor:shannon-scaling,shannon-scaling");

  CertifiedSystem c_shannon = certify_system(shannon, grid1, W1, tol);
  CertifiedSystem c_shannon_w = certify_system(shannon_w, grid1, W1, tol);
  CertifiedSystem c_meyer = certify_system(meyer, grid1, W1, tol);
  CertifiedSystem c_meyer_w = certify_system(meyer_w, grid1, W1, tol);
  CertifiedSystem c_tensor2 = certify_system(tensor2, grid2, W2, tol);
  checks.push_back(from_certificate("certify", shannon.name, c_shannon.certificate));
  checks.push_back(from_certificate("certify", shannon_w.name, c_shannon_w.certificate));
  checks.push_back(from_certificate("certify", meyer.name, c_meyer.certificate));
  checks.push_back(from_certificate("certify", meyer_w.name, c_meyer_w.certificate));
  checks.push_back(from_certificate("certify", tensor2.name, c_tensor2.certificate));

  // certify_ntf mode agreement on a subsample (delta vs projection verdicts)
  {
    const Grid sub = Grid(1, 32, -pi, pi);
    Certificate pa = certify_ntf(shannon, sub, W1, 1e-8, CertifyMode::Projection);
    Certificate da = certify_ntf(shannon, sub, W1, 1e-8, CertifyMode::Delta);
    GeneratorSystem hat = load_system(cfg, "bspline:2");
    Certificate pb = certify_ntf(hat, sub, W1, 1e-8, CertifyMode::Projection);
    Certificate db = certify_ntf(hat, sub, W1, 1e-8, CertifyMode::Delta);
    CheckResult r;
    r.name = "certify-mode-agreement";
    r.system = "shannon-scaling, bspline:2";
    const bool agree = pa.verdict == da.verdict && pb.verdict == db.verdict &&
                       pa.verdict == Verdict::Pass && pb.verdict == Verdict::Fail;
    r.verdict = agree ? Verdict::Pass : Verdict::Fail;
    r.residual = std::max(da.max_residual, std::abs(db.max_residual - pb.max_residual));
    r.bound = std::max(da.max_tail_bound, db.max_tail_bound);
    r.witness = "verdict pairs: " + to_string(pa.verdict) + "/" + to_string(da.verdict) + ", " +
                to_string(pb.verdict) + "/" + to_string(db.verdict);
    checks.push_back(r);
  }

  // --- periodicity ---
  {
    struct Case {
      const CertifiedSystem* sys;
      const IndexWindow* W;
      const Grid* grid;
      std::vector<std::int64_t> k;
      std::string op;
    };
    const PositiveOperator I1 = identity_operator(W1);
    const PositiveOperator d0 = delta_operator(W1, std::vector<std::int64_t>{0});
    const PositiveOperator r1 = interior_psd_operator(W1, 2, cfg.seed);
    const PositiveOperator d00 = delta_operator(W2, std::vector<std::int64_t>{0, 0});
    const std::vector<std::pair<const PositiveOperator*, std::string>> ops1 = {
        {&I1, "identity"}, {&d0, "delta0"}, {&r1, "random"}};
    for (const auto& [T, op_name] : ops1) {
      double worst = 0.0, bound = 0.0;
      std::string witness;
      for (const auto* sys : {&c_shannon, &c_shannon_w, &c_meyer}) {
        for (std::int64_t kk : {std::int64_t{1}, std::int64_t{-2}}) {
          const std::vector<std::int64_t> k{kk};
          for (std::size_t i = 0; i < grid1.size(); ++i) {
            IdentityResidual r = check_periodicity(*sys, *T, grid1.point(i), k, W1,
                                                   op_name == "identity"
                                                       ? std::numeric_limits<double>::infinity()
                                                       : 1e-9);
            if (r.untestable) continue;
            if (r.residual > worst) {
              worst = r.residual;
              witness = sys->system.name + ", k=" + std::to_string(kk) + ", " +
                        vec_str(VecXd::Constant(1, grid1.point(i)[0]));
            }
            bound = std::max(bound, r.bound);
          }
        }
      }
      CheckResult r;
      r.name = "periodicity/" + op_name;
      r.system = "shannon-scaling, shannon-wavelet, meyer-scaling";
      r.residual = worst;
      r.bound = bound;
      r.verdict = classify(worst, tol, std::max(bound, tol));
      r.witness = witness;
      checks.push_back(r);
    }
    // 2-D
    double worst = 0.0, bound = 0.0;
    const std::vector<std::int64_t> k2{1, 1};
    for (std::size_t i = 0; i < grid2.size(); ++i) {
      IdentityResidual r = check_periodicity(c_tensor2, d00, grid2.point(i), k2, W2, 1e-9);
      if (!r.untestable) {
        worst = std::max(worst, r.residual);
        bound = std::max(bound, r.bound);
      }
    }
    CheckResult r2;
    r2.name = "periodicity/2d";
    r2.system = tensor2.name;
    r2.residual = worst;
    r2.bound = bound;
    r2.verdict = classify(worst, tol, std::max(bound, tol));
    checks.push_back(r2);
  }

  // --- linearity (operator sums, scalings, probe phase) ---
  {
    GeneratorSystem haar = load_system(cfg, "haar-scaling");
    CertifiedSystem c_haar = certify_system(haar, Grid(1, 16, -pi, pi), W1, tol);
    const PositiveOperator T = interior_psd_operator(W1, 2, cfg.seed + 1);
    const PositiveOperator S = delta_operator(W1, std::vector<std::int64_t>{0});
    const PositiveOperator TS = T.plus(S);
    const PositiveOperator T2 = T.scaled(2.0);
    const PositiveOperator T0 = T.scaled(0.0);
    const VecXcd f = random_unit_vector(W1.size(), cfg.seed + 2);
    const VecXcd fi = cplx{0.0, 1.0} * f;
    double worst = 0.0;
    for (const auto* sys : {&c_shannon, &c_meyer_w, &c_haar}) {
      for (std::size_t i = 0; i < grid1.size(); i += 4) {
        auto xi = grid1.point(i);
        const double a = local_trace(*sys, TS, xi, W1).value;
        const double b = local_trace(*sys, T, xi, W1).value + local_trace(*sys, S, xi, W1).value;
        const double c = local_trace(*sys, T2, xi, W1).value;
        const double d = 2.0 * local_trace(*sys, T, xi, W1).value;
        const double z = local_trace(*sys, T0, xi, W1).value;
        const double p = restricted_trace(*sys, f, xi, W1).value;
        const double q = restricted_trace(*sys, fi, xi, W1).value;
        worst = std::max({worst, std::abs(a - b), std::abs(c - d), std::abs(z),
                          std::abs(p - q)});
      }
    }
    CheckResult r;
    r.name = "linearity";
    r.system = "shannon-scaling, meyer-wavelet, haar-scaling";
    r.residual = worst;
    r.bound = tol;
    r.verdict = classify(worst, tol, tol);
    checks.push_back(r);
  }

  // --- additivity of orthogonal families ---
  {
    const PositiveOperator I1 = identity_operator(W1);
    const PositiveOperator Pf = rank_one_operator(random_unit_vector(W1.size(), cfg.seed + 3));
    double worst = 0.0, bound = 0.0;
    for (std::size_t i = 0; i < grid1.size(); ++i) {
      for (const PositiveOperator* T : {&I1, &Pf}) {
        IdentityResidual r =
            check_additivity({c_shannon, c_shannon_w}, *T, grid1.point(i), W1);
        worst = std::max(worst, r.residual);
        bound = std::max(bound, r.bound);
      }
    }
    CheckResult r;
    r.name = "additivity";
    r.system = "shannon-scaling + shannon-wavelet";
    r.residual = worst;
    r.bound = bound;
    r.verdict = classify(worst, tol, std::max(bound, tol));
    checks.push_back(r);
  }

  // --- monotony (positive and negative control) ---
  {
    GeneratorSystem big = dilated_system(shannon, dilation_from_config(cfg));
    CertifiedSystem c_big = certify_system(big, Grid(1, 64, -pi, pi), W1, tol);
    const Grid sub(1, 64, -pi, pi);
    MonotonyReport ok = check_monotony(c_shannon, c_big, sub, W1, 32, cfg.seed);
    CheckResult r;
    r.name = "monotony";
    r.system = "shannon-scaling within its dyadic dilate";
    r.residual = std::max(0.0, ok.worst_gap);
    r.bound = tol;
    r.verdict = ok.pass ? Verdict::Pass : Verdict::Fail;
    if (!ok.pass) r.witness = vec_str(ok.witness_xi) + " probe " + ok.witness_probe;
    checks.push_back(r);

    MonotonyReport bad = check_monotony(c_shannon_w, c_shannon, sub, W1, 8, cfg.seed);
    CheckResult rn;
    rn.name = "monotony-negative";
    rn.system = "shannon-wavelet vs shannon-scaling (not nested)";
    rn.residual = bad.worst_gap;
    rn.bound = 0.5;
    rn.verdict = (!bad.pass && bad.worst_gap > 0.5) ? Verdict::Pass : Verdict::Fail;
    rn.witness = bad.pass ? "violation not detected" : vec_str(bad.witness_xi) + " probe " +
                                                           bad.witness_probe;
    checks.push_back(rn);
  }

  // --- modulation ---
  {
    const PositiveOperator d0 = delta_operator(W1, std::vector<std::int64_t>{0});
    const PositiveOperator T = interior_psd_operator(W1, 2, cfg.seed + 4);
    double worst = 0.0, bound = 0.0;
    for (const auto& [a, T_ptr] :
         std::vector<std::pair<double, const PositiveOperator*>>{{pi / 2.0, &d0},
                                                                 {two_pi, &T},
                                                                 {0.0, &d0}}) {
      const std::vector<double> shift{a};
      IdentityResidual r = check_modulation(c_shannon, shift, *T_ptr, grid1, W1, 1e-8);
      worst = std::max(worst, r.residual);
      bound = std::max(bound, r.bound);
    }
    CheckResult r;
    r.name = "modulation";
    r.system = shannon.name;
    r.residual = worst;
    r.bound = bound;
    r.verdict = classify(worst, tol, std::max(bound, tol));
    checks.push_back(r);
  }

  // --- dilation formula over the coset decomposition ---
  {
    struct DilCase {
      std::string label;
      DilationMatrix A;
      const CertifiedSystem* sys;
      const IndexWindow* W;
      const Grid* grid;
    };
    std::vector<DilCase> cases;
    cases.push_back({"[1]", DilationMatrix::from_entries(1, std::vector<std::int64_t>{1}),
                     &c_shannon, &W1, &grid1});
    cases.push_back({"[2]", DilationMatrix::from_entries(1, std::vector<std::int64_t>{2}),
                     &c_shannon, &W1, &grid1});
    cases.push_back({"2I", DilationMatrix::from_entries(2, std::vector<std::int64_t>{2, 0, 0, 2}),
                     &c_tensor2, &W2, &grid2});
    cases.push_back({"quincunx",
                     DilationMatrix::from_entries(2, std::vector<std::int64_t>{1, 1, 1, -1}),
                     &c_tensor2, &W2, &grid2});
    for (const auto& c : cases) {
      const PositiveOperator I = identity_operator(*c.W);
      const PositiveOperator d0 = delta_operator(
          *c.W, std::vector<std::int64_t>(static_cast<std::size_t>(c.W->dim()), 0));
      double worst = 0.0, bound = 0.0;
      std::string witness;
      for (std::size_t i = 0; i < c.grid->size(); ++i) {
        for (const PositiveOperator* T : {&I, &d0}) {
          IdentityResidual r = check_dilation(*c.sys, c.A, *T, c.grid->point(i), *c.W, 1e-8);
          if (r.residual > worst) {
            worst = r.residual;
            witness = vec_str(VecXd::Map(c.grid->point(i).data(),
                                         static_cast<Eigen::Index>(c.W->dim())));
          }
          bound = std::max(bound, r.bound);
        }
      }
      CheckResult r;
      r.name = "dilation/" + c.label;
      r.system = c.sys->system.name;
      r.residual = worst;
      r.bound = bound;
      r.verdict = classify(worst, tol, std::max(bound, tol));
      r.witness = witness;
      checks.push_back(r);
    }
  }

  // --- trace computed through a redundant normalized tight frame ---
  {
    const IndexWindow W(1, 2);
    const PositiveOperator T = random_psd_operator(W, cfg.seed + 5);
    std::vector<VecXcd> onb;
    for (std::size_t i = 0; i < W.size(); ++i) {
      VecXcd e = VecXcd::Zero(static_cast<Eigen::Index>(W.size()));
      e[static_cast<Eigen::Index>(i)] = cplx{1.0, 0.0};
      onb.push_back(e);
    }
    std::vector<VecXcd> redundant = onb;
    redundant[2] = onb[2] / std::sqrt(2.0);
    redundant.push_back(onb[2] / std::sqrt(2.0));
    const double a = operator_trace(T, onb);
    const double b = operator_trace(T, redundant);
    Eigen::SelfAdjointEigenSolver<MatXcd> es(T.matrix(), Eigen::EigenvaluesOnly);
    const double c = es.eigenvalues().sum();
    CheckResult r;
    r.name = "trace-frame-invariance";
    r.system = "window radius 2";
    r.residual = std::max(std::abs(a - b), std::abs(a - c));
    r.bound = 1e-10;
    r.verdict = classify(r.residual, 1e-10, 1e-10);
    checks.push_back(r);
  }

  // --- injectivity witness: distinct spaces expose distinct trace data ---
  {
    const Grid wide(1, 256, -two_pi, two_pi);
    TraceProfile a = spectral_function(c_shannon, wide, W1);
    TraceProfile b = spectral_function(c_shannon_w, wide, W1);
    double sep = 0.0;
    for (std::size_t i = 0; i < wide.size(); ++i)
      sep = std::max(sep, std::abs(a.values[i] - b.values[i]));
    CheckResult r;
    r.name = "injectivity";
    r.system = "shannon-scaling vs shannon-wavelet";
    r.residual = sep;
    r.bound = 0.9;
    r.verdict = sep >= 0.9 ? Verdict::Pass : Verdict::Fail;
    r.witness = "max spectral separation";
    checks.push_back(r);

    double add = 0.0;
    CertifiedSystem uni = CertifiedSystem::unchecked(
        [&] {
          GeneratorSystem u;
          u.name = "union";
          u.dim = 1;
          u.generators = shannon.generators;
          for (const auto& g : shannon_w.generators) u.generators.push_back(g);
          return u;
        }(),
        "orthogonal union");
    TraceProfile u = spectral_function(uni, wide, W1);
    for (std::size_t i = 0; i < wide.size(); ++i)
      add = std::max(add, std::abs(u.values[i] - a.values[i] - b.values[i]));
    CheckResult r2;
    r2.name = "spectral-additivity";
    r2.system = "shannon-scaling + shannon-wavelet";
    r2.residual = add;
    r2.bound = tol;
    r2.verdict = classify(add, tol, tol);
    checks.push_back(r2);
  }

  // --- wavelet dimension against the scaling dimension ---
  {
    WaveletSystem ws = WaveletSystem::make(
        shannon_w, DilationMatrix::from_entries(1, std::vector<std::int64_t>{2}), cfg.depth);
    const Grid sub(1, 128, -pi, pi);
    TraceProfile dw = wavelet_dimension_function(ws, sub, W1);
    TraceProfile ds = dimension_function(c_shannon, sub, W1);
    double worst = 0.0, bound = 0.0;
    for (std::size_t i = 0; i < sub.size(); ++i) {
      worst = std::max(worst, std::abs(dw.values[i] - ds.values[i]));
      bound = std::max(bound, dw.error_bars[i] + ds.error_bars[i]);
    }
    const PositiveOperator I = identity_operator(W1);
    for (std::size_t i = 0; i < sub.size(); i += 8) {
      TraceValue v = v0_trace(ws, I, sub.point(i), W1);
      worst = std::max(worst, std::abs(v.value - dw.values[i]));
    }
    CheckResult r;
    r.name = "dimension-match";
    r.system = "shannon wavelet/scaling";
    r.residual = worst;
    r.bound = std::max(bound, tol);
    r.verdict = classify(worst, tol, std::max(bound, tol));
    checks.push_back(r);
  }

  // --- monotone convergence on a refining Paley-Wiener chain ---
  {
    const Grid wide(1, 256, -two_pi, two_pi);
    const Grid certgrid(1, 32, -pi, pi);
    std::vector<CertifiedSystem> chain;
    for (int j = 0; j <= 3; ++j)
      chain.push_back(certify_system(paley_wiener_system((2.0 - std::pow(0.5, j)) * pi),
                                     certgrid, W1, 1e-8));
    std::vector<double> limit(wide.size(), 1.0);
    MonotoneConvergenceReport rep = check_monotone_convergence(chain, wide, W1, limit);
    double ratio_err = 0.0;
    for (std::size_t j = 0; j + 1 < rep.l1_gaps.size(); ++j)
      if (rep.l1_gaps[j] > 0.0)
        ratio_err = std::max(ratio_err, std::abs(rep.l1_gaps[j + 1] / rep.l1_gaps[j] - 0.5));
    CheckResult r;
    r.name = "monotone-convergence";
    r.system = "refining band chain";
    r.residual = ratio_err;
    r.bound = 0.05;
    r.verdict = (rep.monotone && ratio_err <= 0.05) ? Verdict::Pass : Verdict::Fail;
    checks.push_back(r);

    std::vector<CertifiedSystem> reversed(chain.rbegin(), chain.rend());
    MonotoneConvergenceReport neg = check_monotone_convergence(reversed, wide, W1, limit);
    CheckResult rn;
    rn.name = "monotone-convergence-negative";
    rn.system = "reversed chain";
    rn.residual = neg.monotone ? 0.0 : 1.0;
    rn.bound = 0.5;
    rn.verdict = neg.monotone ? Verdict::Fail : Verdict::Pass;
    rn.witness = neg.violation ? "violation at step " + std::to_string(neg.violation->first)
                               : "no violation found";
    checks.push_back(rn);
  }

  // --- calibration negative control ---
  {
    WaveletSystem zero = WaveletSystem::make(
        load_system(cfg, "zero"), DilationMatrix::from_entries(1, std::vector<std::int64_t>{2}),
        8);
    CalibrationValue cal = calibration_sum(zero, std::vector<double>{0.3});
    CheckResult r;
    r.name = "calibration-negative";
    r.system = "zero";
    r.residual = std::abs(cal.value - 1.0);
    r.bound = 0.5;
    r.verdict = (std::abs(cal.value - 1.0) > 0.5 && cal.tail < 0.1) ? Verdict::Pass
                                                                    : Verdict::Fail;
    checks.push_back(r);
  }

  res.exit_code = res.report.failed() == 0 ? 0 : 1;
  return res;
}

}  // namespace sitrace
