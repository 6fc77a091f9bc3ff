#include "sitrace/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sitrace {

namespace {

std::size_t pow_size(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= static_cast<std::size_t>(base);
    if (r > (std::size_t{1} << 24))
      throw std::invalid_argument("index window too large: (2K+1)^n exceeds 2^24");
  }
  return r;
}

// Fraction-free Gaussian elimination (Bareiss). Exact for integer matrices;
// every intermediate value is checked for 64-bit overflow.
std::int64_t integer_determinant(int n, std::span<const std::int64_t> a) {
  std::vector<std::int64_t> m(a.begin(), a.end());
  auto at = [&](int r, int c) -> std::int64_t& { return m[static_cast<std::size_t>(r * n + c)]; };
  std::int64_t sign = 1;
  std::int64_t prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      int piv = -1;
      for (int r = k + 1; r < n; ++r)
        if (at(r, k) != 0) {
          piv = r;
          break;
        }
      if (piv < 0) return 0;
      for (int c = 0; c < n; ++c) std::swap(at(k, c), at(piv, c));
      sign = -sign;
    }
    for (int r = k + 1; r < n; ++r) {
      for (int c = k + 1; c < n; ++c) {
        std::int64_t num =
            checked_add(checked_mul(at(r, c), at(k, k)), -checked_mul(at(r, k), at(k, c)));
        at(r, c) = num / prev;  // divides exactly (Bareiss)
      }
      at(r, k) = 0;
    }
    prev = at(k, k);
  }
  return checked_mul(sign, at(n - 1, n - 1));
}

std::int64_t minor_determinant(int n, std::span<const std::int64_t> a, int drop_row,
                               int drop_col) {
  std::vector<std::int64_t> sub;
  sub.reserve(static_cast<std::size_t>((n - 1) * (n - 1)));
  for (int r = 0; r < n; ++r) {
    if (r == drop_row) continue;
    for (int c = 0; c < n; ++c) {
      if (c == drop_col) continue;
      sub.push_back(a[static_cast<std::size_t>(r * n + c)]);
    }
  }
  if (n == 1) return 1;
  return integer_determinant(n - 1, sub);
}

}  // namespace

IndexWindow::IndexWindow(int dim, int radius) : dim_(dim), radius_(radius) {
  if (dim < 1) throw std::invalid_argument("index window: dimension must be >= 1");
  if (radius < 1) throw std::invalid_argument("index window: radius must be >= 1");
  const int side = 2 * radius + 1;
  count_ = pow_size(side, dim);
  flat_.resize(count_ * static_cast<std::size_t>(dim));
  std::vector<std::int64_t> cur(static_cast<std::size_t>(dim), -radius);
  for (std::size_t i = 0; i < count_; ++i) {
    std::copy(cur.begin(), cur.end(), flat_.begin() + static_cast<std::ptrdiff_t>(i * dim));
    // odometer, first coordinate fastest
    for (int d = 0; d < dim; ++d) {
      if (++cur[static_cast<std::size_t>(d)] <= radius) break;
      cur[static_cast<std::size_t>(d)] = -radius;
    }
  }
}

bool IndexWindow::contains(std::span<const std::int64_t> k) const {
  if (static_cast<int>(k.size()) != dim_) return false;
  for (std::int64_t x : k)
    if (x < -radius_ || x > radius_) return false;
  return true;
}

std::optional<std::size_t> IndexWindow::position(std::span<const std::int64_t> k) const {
  if (!contains(k)) return std::nullopt;
  std::size_t pos = 0;
  std::size_t stride = 1;
  const std::size_t side = static_cast<std::size_t>(2 * radius_ + 1);
  for (int d = 0; d < dim_; ++d) {
    pos += stride * static_cast<std::size_t>(k[static_cast<std::size_t>(d)] + radius_);
    stride *= side;
  }
  return pos;
}

IndexWindow window(int dim, int radius) { return IndexWindow(dim, radius); }

DilationMatrix DilationMatrix::from_entries(int dim, std::span<const std::int64_t> row_major) {
  if (dim < 1) throw std::invalid_argument("dilation matrix: dimension must be >= 1");
  if (row_major.size() != static_cast<std::size_t>(dim * dim))
    throw std::invalid_argument("dilation matrix: wrong number of entries");
  DilationMatrix A;
  A.dim_ = dim;
  A.a_.assign(row_major.begin(), row_major.end());
  A.det_ = integer_determinant(dim, A.a_);
  if (A.det_ == 0) throw std::invalid_argument("dilation matrix: determinant is zero");
  Eigen::EigenSolver<MatXd> es(A.as_real(), false);
  A.expansive_ = true;
  for (int i = 0; i < dim; ++i)
    if (std::abs(es.eigenvalues()[i]) <= 1.0 + 1e-12) A.expansive_ = false;
  return A;
}

DilationMatrix DilationMatrix::transposed() const {
  std::vector<std::int64_t> t(a_.size());
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      t[static_cast<std::size_t>(c * dim_ + r)] = a_[static_cast<std::size_t>(r * dim_ + c)];
  return from_entries(dim_, t);
}

std::vector<std::int64_t> DilationMatrix::apply(std::span<const std::int64_t> k) const {
  if (static_cast<int>(k.size()) != dim_)
    throw std::invalid_argument("dilation matrix: dimension mismatch");
  std::vector<std::int64_t> out(static_cast<std::size_t>(dim_), 0);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      out[static_cast<std::size_t>(r)] = checked_add(
          out[static_cast<std::size_t>(r)], checked_mul(entry(r, c), k[static_cast<std::size_t>(c)]));
  return out;
}

std::vector<std::int64_t> DilationMatrix::adjugate() const {
  std::vector<std::int64_t> adj(a_.size());
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) {
      std::int64_t cof = minor_determinant(dim_, a_, c, r);
      if ((r + c) % 2 != 0) cof = -cof;
      adj[static_cast<std::size_t>(r * dim_ + c)] = cof;
    }
  return adj;
}

MatXd DilationMatrix::as_real() const {
  MatXd m(dim_, dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) m(r, c) = static_cast<double>(entry(r, c));
  return m;
}

bool in_sublattice(std::span<const std::int64_t> k, const DilationMatrix& A) {
  if (static_cast<int>(k.size()) != A.dim())
    throw std::invalid_argument("in_sublattice: dimension mismatch");
  // k in A^T Z^n  iff  adj(A^T) k == 0 (mod det A) componentwise.
  const DilationMatrix At = A.transposed();
  const std::vector<std::int64_t> adj = At.adjugate();
  const std::int64_t det = At.determinant();
  const int n = A.dim();
  for (int r = 0; r < n; ++r) {
    std::int64_t s = 0;
    for (int c = 0; c < n; ++c)
      s = checked_add(s, checked_mul(adj[static_cast<std::size_t>(r * n + c)],
                                     k[static_cast<std::size_t>(c)]));
    if (s % det != 0) return false;
  }
  return true;
}

CosetSet coset_representatives(const DilationMatrix& A) {
  const int n = A.dim();
  const std::int64_t q = std::abs(A.determinant());
  const std::size_t expected = [&] {
    std::size_t e = 1;
    for (int i = 0; i < n; ++i) e *= static_cast<std::size_t>(q);
    return e;
  }();
  if (expected > (std::size_t{1} << 24))
    throw std::invalid_argument("coset scan box too large");

  CosetSet out;
  out.matrix = A;
  std::vector<std::int64_t> cur(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> diff(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < expected; ++i) {
    bool fresh = true;
    for (const auto& rep : out.representatives) {
      for (int d = 0; d < n; ++d)
        diff[static_cast<std::size_t>(d)] =
            cur[static_cast<std::size_t>(d)] - rep[static_cast<std::size_t>(d)];
      if (in_sublattice(diff, A)) {
        fresh = false;
        break;
      }
    }
    if (fresh) out.representatives.push_back(cur);
    for (int d = 0; d < n; ++d) {
      if (++cur[static_cast<std::size_t>(d)] < q) break;
      cur[static_cast<std::size_t>(d)] = 0;
    }
  }
  if (out.representatives.size() != static_cast<std::size_t>(q))
    throw internal_error("coset scan produced a wrong class count");
  return out;
}

TruncatedOperator shift_operator(std::span<const std::int64_t> k, const IndexWindow& W) {
  if (static_cast<int>(k.size()) != W.dim())
    throw std::invalid_argument("shift_operator: dimension mismatch");
  const std::size_t m = W.size();
  TruncatedOperator op;
  op.matrix = MatXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<std::int64_t> target(k.size());
  for (std::size_t col = 0; col < m; ++col) {
    auto src = W.at(col);
    for (std::size_t d = 0; d < k.size(); ++d) target[d] = checked_add(src[d], k[d]);
    if (auto row = W.position(target)) {
      op.matrix(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) = 1.0;
    } else {
      ++op.dropped;
    }
  }
  return op;
}

TruncatedOperator embed_operator(std::span<const std::int64_t> d, const DilationMatrix& A,
                                 const IndexWindow& W) {
  if (static_cast<int>(d.size()) != W.dim() || A.dim() != W.dim())
    throw std::invalid_argument("embed_operator: dimension mismatch");
  const DilationMatrix At = A.transposed();
  const std::size_t m = W.size();
  TruncatedOperator op;
  op.matrix = MatXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<std::int64_t> target(d.size());
  for (std::size_t col = 0; col < m; ++col) {
    auto l = W.at(col);
    auto Al = At.apply(l);
    for (std::size_t i = 0; i < d.size(); ++i) target[i] = checked_add(Al[i], d[i]);
    if (auto row = W.position(target)) {
      op.matrix(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) = 1.0;
    } else {
      ++op.dropped;
    }
  }
  return op;
}

}  // namespace sitrace
