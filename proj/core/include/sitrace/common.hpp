#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sitrace {

using cplx = std::complex<double>;
using VecXd = Eigen::VectorXd;
using VecXcd = Eigen::VectorXcd;
using MatXd = Eigen::MatrixXd;
using MatXcd = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Thrown when integer lattice arithmetic would overflow 64 bits.
class overflow_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency failure (indicates a bug, not bad input).
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw overflow_error("integer addition overflow");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("integer multiplication overflow");
  return r;
}

/// Sesquilinear inner product <x, y> = sum_k x_k * conj(y_k), linear in the
/// first argument. All Gramian/trace formulas in this library use this
/// convention.
inline cplx inner(const VecXcd& x, const VecXcd& y) { return y.dot(x); }

inline double max_abs_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Fold xi into [-pi, pi) per coordinate; k receives the removed lattice
/// shift, so xi == folded + 2*pi*k.
inline void recenter(std::span<const double> xi, std::span<double> folded,
                     std::span<std::int64_t> k) {
  for (std::size_t i = 0; i < xi.size(); ++i) {
    double s = std::floor((xi[i] + pi) / two_pi);
    k[i] = static_cast<std::int64_t>(s);
    folded[i] = xi[i] - two_pi * s;
  }
}

}  // namespace sitrace
