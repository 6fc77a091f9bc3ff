#pragma once

#include <map>
#include <string>
#include <vector>

#include "sitrace/spectra.hpp"

namespace sitrace {

/// Unknown catalog name or malformed parameters.
class catalog_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One piece of a user-defined spectrum: on [lo, hi) the value is
/// (sum_j coeffs[j] xi^j) * exp(i freq xi); zero elsewhere.
struct PiecewisePiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<cplx> coeffs;
  double freq = 0.0;
};

GeneratorSpectrum make_piecewise_spectrum(const std::string& name,
                                          std::vector<PiecewisePiece> pieces);

/// Built-in exactly-known systems. Selectors:
///   shannon-scaling, shannon-wavelet, haar-scaling, haar-wavelet,
///   bspline:<m>, meyer-scaling, meyer-wavelet, zero,
///   tensor:<name>,<name>[,...]   (tensor product of 1-D entries)
/// `user_spectra` resolves "user:<name>" selectors supplied via config files.
GeneratorSystem catalog_get(const std::string& selector,
                            const std::map<std::string, GeneratorSystem>& user_spectra = {});

std::vector<std::string> catalog_names();

}  // namespace sitrace
