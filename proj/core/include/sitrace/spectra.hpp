#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sitrace/common.hpp"
#include "sitrace/lattice.hpp"

namespace sitrace {

/// Decay and structure metadata for a Fourier-side generator. The envelope
/// asserts |g(xi)| <= C (1 + |xi|_inf)^(-p); the optional fields sharpen tail
/// bounds where the spectrum is known to vanish:
///   support_radius  — g(xi) == 0 for |xi|_inf >  support_radius
///   zero_radius     — g(xi) == 0 for |xi|_inf <  zero_radius
///   vm_order/coeff  — |g(xi)| <= vm_coeff |xi|_inf^vm_order for |xi|_inf <= vm_radius
struct DecayEnvelope {
  double C = 1.0;
  double p = 0.0;
  double support_radius = std::numeric_limits<double>::infinity();
  double zero_radius = 0.0;
  double vm_order = 0.0;
  double vm_coeff = 0.0;
  double vm_radius = 0.0;

  /// Upper bound on |g| over all arguments with |xi|_inf >= r.
  double bound_beyond(double r) const {
    if (r > support_radius) return 0.0;
    return C * std::pow(1.0 + r, -p);
  }

  /// Upper bound on |g| over all arguments with |xi|_inf <= r.
  double bound_within(double r) const {
    if (r < zero_radius) return 0.0;
    double b = C;
    if (vm_order > 0.0 && r <= vm_radius) b = std::min(b, vm_coeff * std::pow(r, vm_order));
    return b;
  }
};

/// A generator given by an evaluable Fourier-side closed form under the
/// convention  f^(xi) = integral f(x) exp(-i <x, xi>) dx.  Evaluation must be
/// total and deterministic; removable singularities are filled with their
/// limits inside the evaluator.
class GeneratorSpectrum {
 public:
  using Evaluator = std::function<cplx(std::span<const double>)>;

  GeneratorSpectrum() = default;
  GeneratorSpectrum(std::string name, int dim, Evaluator eval, DecayEnvelope env,
                    std::string smoothness = {})
      : name_(std::move(name)),
        dim_(dim),
        eval_(std::move(eval)),
        env_(env),
        smoothness_(std::move(smoothness)) {}

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const DecayEnvelope& envelope() const { return env_; }
  const std::string& smoothness_note() const { return smoothness_; }

  cplx evaluate(std::span<const double> xi) const {
    if (static_cast<int>(xi.size()) != dim_)
      throw std::invalid_argument("spectrum evaluation: dimension mismatch");
    return eval_(xi);
  }

 private:
  std::string name_;
  int dim_ = 0;
  Evaluator eval_;
  DecayEnvelope env_;
  std::string smoothness_;
};

enum class SystemRole { NtfGenerator, Bessel, Frame, Unverified };

std::string to_string(SystemRole role);

/// Finite ordered family of generators of one shift-invariant space. The role
/// is a claim carried from the catalog; certification lives in the Gramian
/// layer and is never assumed from this tag.
struct GeneratorSystem {
  std::string name;
  int dim = 1;
  SystemRole claimed_role = SystemRole::Unverified;
  std::vector<GeneratorSpectrum> generators;
};

/// Window restriction of the fiberization (f^(xi + 2 pi k))_k, together with
/// a rigorous bound on the squared l2 mass outside the window.
struct FiberVector {
  VecXcd values;
  double tail_bound = 0.0;

  double norm_sq() const { return values.squaredNorm(); }
};

struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

/// Bound on sum_{|k|_inf > K} |g(xi + 2 pi k)|^2 derived from the envelope by
/// shellwise comparison. `inv_scale` generalizes to arguments M(xi + 2 pi k)
/// with |M v|_inf >= |v|_inf / inv_scale. Returns +inf when the envelope
/// decays too slowly to sum (2p <= n and no compact support).
double fiber_tail_sq(const DecayEnvelope& env, int dim, int radius, double xi_inf,
                     double inv_scale = 1.0);

/// Bound on the full lattice sum  sum_{k in Z^n} |g(M (xi + 2 pi k))|^2 with
/// |M v|_inf >= |v|_inf / inv_scale, used for scale tails of quasi-affine sums.
double lattice_sum_sq(const DecayEnvelope& env, int dim, std::span<const double> xi,
                      double inv_scale);

FiberVector fiber(const GeneratorSpectrum& g, std::span<const double> xi, const IndexWindow& W);

/// Windowed periodization  sum_k |g(xi + 2 pi k)|^2  with its truncation tail
/// as the error bar.
ValueWithError periodization(const GeneratorSpectrum& g, std::span<const double> xi,
                             const IndexWindow& W);

/// Divides the spectrum by the square root of its own periodization, yielding
/// a generator of the same space whose periodization is {0,1}-valued. Points
/// with periodization below `tol` map to zero.
GeneratorSpectrum quasi_orthogonalize(const GeneratorSpectrum& g, const IndexWindow& W,
                                      double tol);

/// Grid points where the periodization falls in [tol, 10 tol]: numerically
/// ambiguous for the quasi-orthogonalization cutoff.
std::vector<std::size_t> quasi_orthogonalize_ambiguities(const GeneratorSpectrum& g,
                                                         const IndexWindow& W, double tol,
                                                         const class Grid& grid);

/// Fourier-side modulation: evaluates at xi - a.
GeneratorSpectrum modulate(const GeneratorSpectrum& g, std::span<const double> a);

GeneratorSystem modulate(const GeneratorSystem& sys, std::span<const double> a);

GeneratorSystem quasi_orthogonalize(const GeneratorSystem& sys, const IndexWindow& W, double tol);

/// Checks |g| <= 1.01 * envelope on `samples` pseudo-random points; returns a
/// violating point if any.
std::optional<std::vector<double>> envelope_violation(const GeneratorSpectrum& g,
                                                      std::size_t samples, std::uint64_t seed);

}  // namespace sitrace
