#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sitrace/gramian.hpp"
#include "sitrace/grid.hpp"
#include "sitrace/positive_operator.hpp"

namespace sitrace {

struct TraceValue {
  double value = 0.0;
  double error_bar = 0.0;
  /// |fiber-sum route - projection-trace route| when cross-checking.
  std::optional<double> cross_discrepancy;
};

/// Sampled scalar profile over a grid with per-point truncation bounds.
struct TraceProfile {
  Grid grid;
  std::vector<double> values;
  std::vector<double> error_bars;
  std::string provenance;
  /// Points where a near-integer value was expected but deviates by > 1e-6.
  std::vector<std::size_t> integer_deviation_flags;
};

/// Local trace tau_{V,T}(xi) = sum_g <T fiber_g(xi), fiber_g(xi)> over a
/// certified generator family. Requires a certificate that did not fail;
/// an Inconclusive certificate (residuals within truncation bars) is accepted
/// and its slack is already part of the returned error bars.
TraceValue local_trace(const CertifiedSystem& sys, const PositiveOperator& T,
                       std::span<const double> xi, const IndexWindow& W,
                       bool cross_check = false);

/// Restricted trace tau_{V,f}(xi) = sum_g |<f, fiber_g(xi)>|^2 for a window
/// vector f. Exact up to roundoff: window-supported probes never touch the
/// truncated coordinates. Cross-checks against ||P(xi) f||^2 on request.
TraceValue restricted_trace(const CertifiedSystem& sys, const VecXcd& f,
                            std::span<const double> xi, const IndexWindow& W,
                            bool cross_check = false);

/// tau_{V,I}: the fiber dimension profile. Near-integer deviations above 1e-6
/// are flagged for quasi-orthogonal families.
TraceProfile dimension_function(const CertifiedSystem& sys, const Grid& grid,
                                const IndexWindow& W);

/// tau_{V,delta_0} extended beyond the fundamental cell by recentring:
/// at xi = xi0 + 2 pi k the probe becomes delta_k.
TraceProfile spectral_function(const CertifiedSystem& sys, const Grid& grid,
                               const IndexWindow& W);

/// Trace of T against an explicit finite family (orthonormal or a normalized
/// tight frame of the full window space).
double operator_trace(const PositiveOperator& T, const std::vector<VecXcd>& family);

struct IdentityResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double bound = 0.0;  // combined error bars; a residual below this is consistent
  bool untestable = false;
  std::string detail;
};

/// tau(xi + 2 pi k; T) against tau(xi; lambda(k) T lambda(k)^*). Reports
/// untestable when conjugating T pushed significant mass over the boundary.
IdentityResidual check_periodicity(const CertifiedSystem& sys, const PositiveOperator& T,
                                   std::span<const double> xi, std::span<const std::int64_t> k,
                                   const IndexWindow& W, double mass_tol = 1e-9);

/// Trace of the orthogonal union against the sum of traces. Verifies pairwise
/// fiber orthogonality first and throws if it fails.
IdentityResidual check_additivity(const std::vector<CertifiedSystem>& parts,
                                  const PositiveOperator& T, std::span<const double> xi,
                                  const IndexWindow& W, double ortho_tol = 1e-8);

struct MonotonyReport {
  bool pass = true;
  double worst_gap = 0.0;  // max of tau_small - tau_big - slack over probes
  VecXd witness_xi;
  std::string witness_probe;
};

/// One-sided comparison tau_{small,P_f} <= tau_{big,P_f} over a probe basket:
/// every window delta plus `random_probes` seeded unit vectors.
MonotonyReport check_monotony(const CertifiedSystem& smaller, const CertifiedSystem& bigger,
                              const Grid& grid, const IndexWindow& W,
                              std::size_t random_probes = 32, std::uint64_t seed = 0x5EED);

/// Builds the modulated system, recertifies it on the grid, and compares its
/// trace profile with the shifted profile of the original.
IdentityResidual check_modulation(const CertifiedSystem& sys, std::span<const double> a,
                                  const PositiveOperator& T, const Grid& grid,
                                  const IndexWindow& W, double certify_tol = 1e-8);

/// Two-route dilation identity at one point. The left side evaluates the
/// trace of the dilated space through an explicitly constructed generator
/// family (one generator per coset of Z^n / A Z^n); the right side sums
/// conjugated traces of the original over the cosets of Z^n / A^T Z^n.
/// Requires a quasi-orthogonal input family.
IdentityResidual check_dilation(const CertifiedSystem& sys, const DilationMatrix& A,
                                const PositiveOperator& T, std::span<const double> xi,
                                const IndexWindow& W, double certify_tol = 1e-8);

/// Verifies that every generator has {0,1}-valued periodization and that
/// distinct generators have orthogonal fibers, over the probe grid.
bool is_quasi_orthogonal(const GeneratorSystem& sys, const Grid& probe, const IndexWindow& W,
                         double tol);

struct MonotoneConvergenceReport {
  bool monotone = true;
  std::optional<std::pair<std::size_t, std::size_t>> violation;  // (step j, grid index)
  std::vector<double> l1_gaps;  // quadrature distance of each profile to the limit
  std::vector<TraceProfile> profiles;
};

/// For a nested chain, checks that the spectral profiles are pointwise
/// nondecreasing (within error bars) and reports the L1 quadrature gap of
/// each profile to the supplied limit profile.
MonotoneConvergenceReport check_monotone_convergence(const std::vector<CertifiedSystem>& chain,
                                                     const Grid& grid, const IndexWindow& W,
                                                     const std::vector<double>& limit_profile);

/// Explicit generator family for the dilated space D_A V of a quasi-orthogonal
/// system: spectra |det A|^(-1/2) e^(-i <l, (A^T)^(-1) xi>) g((A^T)^(-1) xi)
/// over the coset representatives l of Z^n / A Z^n.
GeneratorSystem dilated_system(const GeneratorSystem& sys, const DilationMatrix& A);

}  // namespace sitrace
