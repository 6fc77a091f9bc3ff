#include "sitrace/positive_operator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sitrace {

namespace {

void require_hermitian(const MatXcd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-13 * scale)
    throw std::invalid_argument("positive operator: matrix is not Hermitian");
}

// Frobenius mass of the rows/columns of T indexed by `lost`.
double lost_mass(const MatXcd& T, const std::vector<bool>& lost) {
  double sq = 0.0;
  const Eigen::Index n = T.rows();
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      if (lost[static_cast<std::size_t>(r)] || lost[static_cast<std::size_t>(c)])
        sq += std::norm(T(r, c));
  return std::sqrt(sq);
}

// Deterministic standard Gaussian from raw mt19937_64 output (Box-Muller on
// uniform doubles built from the top 53 bits), independent of the standard
// library's distribution implementations.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u = 0.0;
    do { u = uniform(); } while (u <= 0.0);
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(two_pi * v);
    have_ = true;
    return r * std::cos(two_pi * v);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0.0;
};

}  // namespace

PositiveOperator::PositiveOperator(MatXcd matrix, double norm_bound, double trunc_error,
                                   double beyond_window_norm)
    : mat_(std::move(matrix)),
      norm_bound_(norm_bound),
      trunc_error_(trunc_error),
      beyond_(beyond_window_norm) {
  require_hermitian(mat_);
}

PositiveOperator PositiveOperator::scaled(double factor) const {
  if (factor < 0.0) throw std::invalid_argument("positive operator: negative scale");
  return PositiveOperator(factor * mat_, factor * norm_bound_, factor * trunc_error_,
                          factor * beyond_);
}

PositiveOperator PositiveOperator::plus(const PositiveOperator& other) const {
  if (other.size() != size()) throw std::invalid_argument("positive operator: size mismatch");
  return PositiveOperator(mat_ + other.mat_, norm_bound_ + other.norm_bound_,
                          trunc_error_ + other.trunc_error_, beyond_ + other.beyond_);
}

PositiveOperator identity_operator(const IndexWindow& W) {
  const Eigen::Index n = static_cast<Eigen::Index>(W.size());
  return PositiveOperator(MatXcd::Identity(n, n), 1.0, 0.0, 1.0);
}

PositiveOperator rank_one_operator(const VecXcd& f) {
  return PositiveOperator(f * f.adjoint(), f.squaredNorm(), 0.0, 0.0);
}

PositiveOperator delta_operator(const IndexWindow& W, std::span<const std::int64_t> k) {
  const auto pos = W.position(k);
  if (!pos) throw std::invalid_argument("delta operator: index outside window");
  VecXcd f = VecXcd::Zero(static_cast<Eigen::Index>(W.size()));
  f[static_cast<Eigen::Index>(*pos)] = cplx{1.0, 0.0};
  return rank_one_operator(f);
}

PositiveOperator conjugate_by_shift(const PositiveOperator& T, std::span<const std::int64_t> k,
                                    const IndexWindow& W) {
  if (T.size() != W.size()) throw std::invalid_argument("conjugate_by_shift: size mismatch");
  const TruncatedOperator lam = shift_operator(k, W);
  MatXcd conj = lam.matrix * T.matrix() * lam.matrix.transpose();

  std::vector<bool> lost(W.size(), false);
  std::vector<std::int64_t> target(k.size());
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto a = W.at(i);
    for (std::size_t d = 0; d < k.size(); ++d) target[d] = checked_add(a[d], k[d]);
    lost[i] = !W.contains(target);
  }
  const double dropped = lost_mass(T.matrix(), lost);
  return PositiveOperator(std::move(conj), T.norm_bound(), T.trunc_error() + dropped,
                          T.beyond_window_norm());
}

PositiveOperator conjugate_by_embed(const PositiveOperator& T, std::span<const std::int64_t> d,
                                    const DilationMatrix& A, const IndexWindow& W) {
  if (T.size() != W.size()) throw std::invalid_argument("conjugate_by_embed: size mismatch");
  const TruncatedOperator D = embed_operator(d, A, W);
  MatXcd conj = D.matrix.transpose() * T.matrix() * D.matrix;

  // Entries of T at coordinates a = d + A^T l with l outside the window are
  // visible to the ideal conjugation but not to the truncated one.
  const DilationMatrix At = A.transposed();
  const std::vector<std::int64_t> adj = At.adjugate();
  const std::int64_t det = At.determinant();
  const int n = W.dim();
  std::vector<bool> lost(W.size(), false);
  std::vector<std::int64_t> l(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto a = W.at(i);
    bool integral = true;
    for (int r = 0; r < n && integral; ++r) {
      std::int64_t s = 0;
      for (int c = 0; c < n; ++c)
        s = checked_add(s, checked_mul(adj[static_cast<std::size_t>(r * n + c)],
                                       a[static_cast<std::size_t>(c)] - d[static_cast<std::size_t>(c)]));
      if (s % det != 0)
        integral = false;
      else
        l[static_cast<std::size_t>(r)] = s / det;
    }
    lost[i] = integral && !W.contains(l);
  }
  const double dropped = lost_mass(T.matrix(), lost);
  return PositiveOperator(std::move(conj), T.norm_bound(), T.trunc_error() + dropped,
                          T.beyond_window_norm());
}

PositiveOperator random_psd_operator(const IndexWindow& W, std::uint64_t seed) {
  GaussianSource g(seed);
  const Eigen::Index n = static_cast<Eigen::Index>(W.size());
  MatXcd B(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) B(r, c) = cplx{g(), g()};
  MatXcd T = B.adjoint() * B;
  Eigen::SelfAdjointEigenSolver<MatXcd> es(T, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  T /= top;
  return PositiveOperator(std::move(T), 1.0, 0.0, 0.0);
}

VecXcd random_unit_vector(std::size_t dim, std::uint64_t seed) {
  GaussianSource g(seed);
  VecXcd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx{g(), g()};
  const double n = v.norm();
  if (n == 0.0) {
    v[0] = cplx{1.0, 0.0};
    return v;
  }
  return v / n;
}

}  // namespace sitrace
