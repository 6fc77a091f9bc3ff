#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sitrace/common.hpp"

namespace sitrace {

/// Finite symmetric box {k in Z^n : |k|_inf <= K}, the truncated index set for
/// fiber coordinates. Indices are enumerated with the first coordinate varying
/// fastest, so matrices built over a window are reproducible bit for bit.
class IndexWindow {
 public:
  IndexWindow(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  std::size_t size() const { return count_; }

  /// The i-th index vector in enumeration order.
  std::span<const std::int64_t> at(std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  bool contains(std::span<const std::int64_t> k) const;

  /// Position of k in the enumeration, or nullopt if outside the window.
  std::optional<std::size_t> position(std::span<const std::int64_t> k) const;

 private:
  int dim_;
  int radius_;
  std::size_t count_;
  std::vector<std::int64_t> flat_;
};

IndexWindow window(int dim, int radius);

/// Integer n x n matrix with nonzero determinant. The determinant is computed
/// exactly over the integers; expansive() reports whether every eigenvalue
/// modulus exceeds 1 (needed by the wavelet layer, not enforced here).
class DilationMatrix {
 public:
  static DilationMatrix from_entries(int dim, std::span<const std::int64_t> row_major);

  int dim() const { return dim_; }
  std::int64_t entry(int r, int c) const { return a_[static_cast<std::size_t>(r * dim_ + c)]; }
  std::span<const std::int64_t> entries() const { return a_; }
  std::int64_t determinant() const { return det_; }
  bool expansive() const { return expansive_; }

  DilationMatrix transposed() const;

  /// Exact integer product A*k.
  std::vector<std::int64_t> apply(std::span<const std::int64_t> k) const;

  /// Adjugate matrix, exact: adj(A) * A = det(A) * I.
  std::vector<std::int64_t> adjugate() const;

  MatXd as_real() const;

 private:
  DilationMatrix() = default;
  int dim_ = 0;
  std::vector<std::int64_t> a_;
  std::int64_t det_ = 0;
  bool expansive_ = false;
};

struct CosetSet {
  DilationMatrix matrix;
  std::vector<std::vector<std::int64_t>> representatives;
};

/// Truncation of a lattice operator to window coordinates. `dropped` counts
/// source indices whose image fell outside the window.
struct TruncatedOperator {
  MatXd matrix;
  std::size_t dropped = 0;
};

/// Exact test for k in A^T Z^n (the adjoint lattice), via adj(A^T) k == 0
/// modulo det(A). No floating point is involved.
bool in_sublattice(std::span<const std::int64_t> k, const DilationMatrix& A);

/// A complete set of |det A| representatives of Z^n / A^T Z^n. Each
/// representative is the first member of its class met when scanning the box
/// [0, |det A|)^n with the first coordinate varying fastest.
CosetSet coset_representatives(const DilationMatrix& A);

/// Matrix of the shift (lambda(k) a)(l) = a(l - k) truncated to the window:
/// column m has a 1 in row m + k when both lie inside.
TruncatedOperator shift_operator(std::span<const std::int64_t> k, const IndexWindow& W);

/// Matrix of the coset embedding (D_d a)(k) = a(l) if k = d + A^T l, else 0,
/// truncated to the window. Columns are distinct standard basis vectors, so
/// the truncation is a partial isometry on the surviving coordinates.
TruncatedOperator embed_operator(std::span<const std::int64_t> d, const DilationMatrix& A,
                                 const IndexWindow& W);

}  // namespace sitrace
