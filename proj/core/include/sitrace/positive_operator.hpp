#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "sitrace/common.hpp"
#include "sitrace/lattice.hpp"

namespace sitrace {

/// Hermitian positive-semidefinite operator on window coordinates, modeling a
/// positive operator on l2(Z^n) truncated to the window.
///
/// Truncation is accounted for in two fields:
///   trunc_error        — operator-norm bound on the difference between this
///                        matrix and the ideal (untruncated) operator on the
///                        modeled coordinates; grows when conjugations push
///                        mass across the window boundary.
///   beyond_window_norm — norm of the ideal operator on the complement of the
///                        window (1 for the identity, 0 for window-supported
///                        operators such as P_f). It scales the fiber-tail
///                        contribution to trace error bars.
class PositiveOperator {
 public:
  PositiveOperator(MatXcd matrix, double norm_bound, double trunc_error,
                   double beyond_window_norm);

  const MatXcd& matrix() const { return mat_; }
  std::size_t size() const { return static_cast<std::size_t>(mat_.rows()); }
  double norm_bound() const { return norm_bound_; }
  double trunc_error() const { return trunc_error_; }
  double beyond_window_norm() const { return beyond_; }

  PositiveOperator scaled(double factor) const;
  PositiveOperator plus(const PositiveOperator& other) const;

 private:
  MatXcd mat_;
  double norm_bound_;
  double trunc_error_;
  double beyond_;
};

/// Identity on window coordinates (ideal operator: identity on all of l2).
PositiveOperator identity_operator(const IndexWindow& W);

/// Rank-one operator P_f(v) = <v, f> f.
PositiveOperator rank_one_operator(const VecXcd& f);

/// P_{delta_k} for a window index k.
PositiveOperator delta_operator(const IndexWindow& W, std::span<const std::int64_t> k);

/// Conjugation lambda(k) T lambda(k)^* by the truncated shift; mass of T on
/// coordinates pushed outside the window moves into trunc_error.
PositiveOperator conjugate_by_shift(const PositiveOperator& T, std::span<const std::int64_t> k,
                                    const IndexWindow& W);

/// Conjugation D_d^* T D_d by the truncated coset embedding.
PositiveOperator conjugate_by_embed(const PositiveOperator& T, std::span<const std::int64_t> d,
                                    const DilationMatrix& A, const IndexWindow& W);

/// Random PSD operator with unit norm, for probe baskets. Deterministic for a
/// fixed seed across platforms (hand-rolled Gaussian).
PositiveOperator random_psd_operator(const IndexWindow& W, std::uint64_t seed);

/// Deterministic pseudo-random unit vector on window coordinates.
VecXcd random_unit_vector(std::size_t dim, std::uint64_t seed);

}  // namespace sitrace
