#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sitrace/grid.hpp"
#include "sitrace/spectra.hpp"

namespace sitrace {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

/// Gramian of the fibers at one base point: entry (i, j) = <fiber_i, fiber_j>.
/// tail_bound dominates both the trace error and the operator-norm error of
/// the window truncation.
struct FiberGramian {
  VecXd xi;
  MatXcd matrix;
  double tail_bound = 0.0;
};

/// Dual Gramian at one base point: entry (r, s) = sum_g g(xi + 2 pi r) *
/// conj(g(xi + 2 pi s)), i.e. the sum of fiber outer products. tail_bound
/// bounds the operator-norm distance to the untruncated dual Gramian.
struct FiberDualGramian {
  VecXd xi;
  MatXcd matrix;
  double tail_bound = 0.0;
};

/// Orthogonal projection onto the span of the fibers at one base point,
/// obtained from the eigendecomposition of the dual Gramian.
struct RangeProjection {
  VecXd xi;
  MatXcd matrix;
  int rank = 0;
  /// Eigenvalues in [tol, sqrt(tol)] relative: the span is ill separated and
  /// the rank is ambiguous at this point.
  std::vector<double> ambiguous_eigenvalues;
  /// Distance between the dual Gramian and the eigendecomposition projection;
  /// only populated by the certified overload.
  std::optional<double> ntf_distance;
};

struct FrameBoundsRow {
  VecXd xi;
  double min_nonzero = 0.0;
  double max = 0.0;
};

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate = false;  // all-zero system: no frame bounds exist
  std::vector<FrameBoundsRow> per_point;
};

enum class CertifyMode { Projection, Delta, GramianMatch };

std::string to_string(CertifyMode m);

/// Outcome of a grid certification. A Pass asserts the tested identity at
/// every grid point within tol; Inconclusive means every excess residual was
/// within the truncation error bar; Fail carries the worst witness.
struct Certificate {
  Verdict verdict = Verdict::Fail;
  CertifyMode mode = CertifyMode::Projection;
  double tol = 0.0;
  double max_residual = 0.0;
  double max_tail_bound = 0.0;
  VecXd worst_xi;
  /// Projection mode: eigenvalue of the worst offender (its distance to {0,1}
  /// is the residual there).
  double witness_eigenvalue = 0.0;
  std::size_t grid_points = 0;
  int window_radius = 0;
  std::size_t inconclusive_points = 0;
  /// Set when the certificate was not produced by a certification run
  /// (explicit override or a construction that guarantees the frame property).
  bool unchecked = false;
  std::string note;

  bool passed() const { return verdict == Verdict::Pass; }
};

/// A generator system paired with its certificate. The trace layer refuses
/// systems whose certificate failed.
struct CertifiedSystem {
  GeneratorSystem system;
  Certificate certificate;

  /// Escape hatch: claims the frame property without verification.
  static CertifiedSystem unchecked(GeneratorSystem sys, std::string reason);
};

FiberGramian gramian(const GeneratorSystem& sys, std::span<const double> xi,
                     const IndexWindow& W);

FiberDualGramian dual_gramian(const GeneratorSystem& sys, std::span<const double> xi,
                              const IndexWindow& W);

RangeProjection range_projection(const GeneratorSystem& sys, std::span<const double> xi,
                                 const IndexWindow& W, double tol = 1e-8);

/// For a certified system the dual Gramian is itself the projection; it is
/// returned directly and its distance from the eigendecomposition projection
/// is reported in ntf_distance.
RangeProjection range_projection(const CertifiedSystem& sys, std::span<const double> xi,
                                 const IndexWindow& W, double tol = 1e-8);

/// Frame bound estimates over a grid: extreme eigenvalues of the fiber
/// Gramian, ignoring eigenvalues below rank_tol relative to the global max.
FrameBounds frame_bounds(const GeneratorSystem& sys, const Grid& grid, const IndexWindow& W,
                         double rank_tol = 1e-8);

/// Certifies that the system is a normalized-tight-frame generator of the
/// space its translates span.
///   Projection  — the dual Gramian is an orthogonal projection (idempotent,
///                 eigenvalues in {0,1});
///   Delta       — the quadratic identities on probes delta_0 + alpha delta_l,
///                 alpha in {0, 1, i}, against the range projection;
///   GramianMatch— entrywise equality of the dual Gramian with `reference`
///                 (certifies an NTF generator of the same space).
Certificate certify_ntf(const GeneratorSystem& sys, const Grid& grid, const IndexWindow& W,
                        double tol, CertifyMode mode,
                        const GeneratorSystem* reference = nullptr);

CertifiedSystem certify_system(const GeneratorSystem& sys, const Grid& grid,
                               const IndexWindow& W, double tol,
                               CertifyMode mode = CertifyMode::Projection);

/// Checks the two generator equations for a normalized tight frame of the
/// whole space: sum |g(xi)|^2 = 1 and sum g(xi) conj g(xi + 2 pi l) = 0 for
/// l != 0 in the window.
Certificate full_space_check(const GeneratorSystem& sys, const Grid& grid, const IndexWindow& W,
                             double tol);

}  // namespace sitrace
