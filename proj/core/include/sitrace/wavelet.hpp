#pragma once

#include <string>
#include <vector>

#include "sitrace/gramian.hpp"
#include "sitrace/positive_operator.hpp"
#include "sitrace/trace_function.hpp"

namespace sitrace {

/// Finite wavelet family with an expansive integer dilation and a truncation
/// depth for scale sums. Semiorthogonality is an input claim, spot-checked by
/// the consumers that need it.
struct WaveletSystem {
  GeneratorSystem psis;
  DilationMatrix dilation;
  int scale_depth = 30;
  bool claimed_semiorthogonal = true;

  static WaveletSystem make(GeneratorSystem psis, DilationMatrix dilation, int scale_depth = 30,
                            bool semiorthogonal = true);
};

struct CalibrationValue {
  double value = 0.0;
  double tail = 0.0;
  bool tail_warning = false;  // the scale-tail monitor could not certify decay
};

struct TranslateValue {
  cplx value{0.0, 0.0};
  double tail = 0.0;
};

/// sum over scales j in [-J, J] of sum_psi |psi((A^T)^j xi)|^2, with tail
/// bounds for both ends of the scale axis. Equals 1 for an NTF wavelet.
CalibrationValue calibration_sum(const WaveletSystem& ws, std::span<const double> xi,
                                 int depth = -1);

/// t_s(xi) = sum_psi sum_{j >= 0} psi((A^T)^j xi) conj psi((A^T)^j (xi + 2 pi s)).
/// Rejects s in the adjoint sublattice A^T Z^n (where the identity does not
/// apply). Equals 0 for an NTF wavelet.
TranslateValue translate_sum(const WaveletSystem& ws, std::span<const std::int64_t> s,
                             std::span<const double> xi, int depth = -1);

struct ResidualRow {
  VecXd xi;
  std::string equation;  // "calibration" or "orthogonality:s=<vec>"
  double residual = 0.0;
  double tail = 0.0;
};

struct WaveletCertificate {
  Certificate summary;
  std::vector<ResidualRow> rows;
};

/// Full characterization: calibration_sum == 1 on the grid and
/// translate_sum == 0 for every s with |s|_inf <= s_range outside A^T Z^n.
WaveletCertificate characterize_ntf_wavelet(const WaveletSystem& ws, const Grid& grid,
                                            int s_range, double tol);

struct QuasiAffineFiber {
  int scale = 0;
  std::size_t psi_index = 0;
  FiberVector fiber;  // values(k) = psi((A^T)^j (xi + 2 pi k))
};

/// The fiber family {f_psi^j(xi) : 1 <= j <= J, psi} of the negative-scale
/// space V0; for a semiorthogonal wavelet it is a normalized tight frame of
/// the fiber of V0.
std::vector<QuasiAffineFiber> quasi_affine_fibers(const WaveletSystem& ws,
                                                  std::span<const double> xi,
                                                  const IndexWindow& W, int depth = -1);

/// Trace of T against the quasi-affine fiber family: the local trace of V0.
TraceValue v0_trace(const WaveletSystem& ws, const PositiveOperator& T,
                    std::span<const double> xi, const IndexWindow& W, int depth = -1);

/// D(xi) = sum_k sum_psi sum_{j>=1} |psi((A^T)^j (xi + 2 pi k))|^2, the
/// wavelet dimension profile, with combined lattice and scale tails.
TraceProfile wavelet_dimension_function(const WaveletSystem& ws, const Grid& grid,
                                        const IndexWindow& W, int depth = -1);

/// Consistency of a candidate scaling family Phi with the wavelet family:
/// sum_psi sum_{j>=1} psi((A^T)^j xi) conj psi((A^T)^j (xi+2 pi s)) must equal
/// sum_phi phi(xi) conj phi(xi + 2 pi s) for every |s|_inf <= s_range.
/// A pass certifies Phi as a normalized-tight-frame generator of V0.
Certificate scaling_wavelet_match(const WaveletSystem& ws, const GeneratorSystem& scaling,
                                  const Grid& grid, int s_range, double tol);

/// The two single-scale relations tying a semiorthogonal wavelet to a scaling
/// family of V0: the squared-modulus telescoping identity and the alternating
/// translate identity on s outside A^T Z^n. Purely pointwise, no truncation.
Certificate mra_consistency(const WaveletSystem& ws, const GeneratorSystem& scaling,
                            const Grid& grid, int s_range, double tol);

/// Explicit generator family for V0: spectra xi -> psi((A^T)^j xi), j = 1..J.
GeneratorSystem quasi_affine_generator_system(const WaveletSystem& ws, int depth = -1);

}  // namespace sitrace
