#include "mlfsi/sparse.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mlfsi/errors.hpp"

namespace mlfsi::fem {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(const TripletList& t) {
  const auto& e = t.entries();
  std::vector<std::size_t> order(e.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return e[a].row != e[b].row ? e[a].row < e[b].row : e[a].col < e[b].col;
  });

  CsrMatrix m(t.rows(), t.cols());
  m.col_idx_.reserve(e.size());
  m.values_.reserve(e.size());
  std::vector<std::size_t> counts(t.rows(), 0);
  for (std::size_t k = 0; k < order.size();) {
    const auto& first = e[order[k]];
    if (first.row >= t.rows() || first.col >= t.cols())
      throw std::out_of_range("CsrMatrix::from_triplets: index out of range");
    double sum = 0.0;
    std::size_t l = k;
    for (; l < order.size() && e[order[l]].row == first.row && e[order[l]].col == first.col; ++l)
      sum += e[order[l]].value;
    m.col_idx_.push_back(first.col);
    m.values_.push_back(sum);
    ++counts[first.row];
    k = l;
  }
  for (std::size_t i = 0; i < t.rows(); ++i) m.row_ptr_[i + 1] = m.row_ptr_[i] + counts[i];
  return m;
}

double CsrMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector CsrMatrix::operator*(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != cols_)
    throw std::invalid_argument("CsrMatrix: dimension mismatch in product");
  Vector y = Vector::Zero(static_cast<Eigen::Index>(rows_));
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      s += values_[k] * x[static_cast<Eigen::Index>(col_idx_[k])];
    y[static_cast<Eigen::Index>(i)] = s;
  }
  return y;
}

double CsrMatrix::bilinear(const Vector& x, const Vector& y) const {
  if (static_cast<std::size_t>(x.size()) != rows_)
    throw std::invalid_argument("CsrMatrix: dimension mismatch in bilinear form");
  return x.dot((*this) * y);
}

CsrMatrix CsrMatrix::transpose() const {
  TripletList t(cols_, rows_);
  t.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.add(col_idx_[k], i, values_[k]);
  return from_triplets(t);
}

double CsrMatrix::max_asymmetry() const {
  if (rows_ != cols_) throw std::invalid_argument("max_asymmetry: matrix not square");
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      worst = std::max(worst, std::abs(values_[k] - coeff(col_idx_[k], i)));
  return worst;
}

CsrMatrix CsrMatrix::add(double a, const CsrMatrix& A, double b, const CsrMatrix& B) {
  if (A.rows_ != B.rows_ || A.cols_ != B.cols_)
    throw std::invalid_argument("CsrMatrix::add: shape mismatch");
  TripletList t(A.rows_, A.cols_);
  t.reserve(A.nnz() + B.nnz());
  for (std::size_t i = 0; i < A.rows_; ++i) {
    for (std::size_t k = A.row_ptr_[i]; k < A.row_ptr_[i + 1]; ++k)
      t.add(i, A.col_idx_[k], a * A.values_[k]);
    for (std::size_t k = B.row_ptr_[i]; k < B.row_ptr_[i + 1]; ++k)
      t.add(i, B.col_idx_[k], b * B.values_[k]);
  }
  return from_triplets(t);
}

CsrMatrix CsrMatrix::scaled(double s) const {
  CsrMatrix m = *this;
  for (double& v : m.values_) v *= s;
  return m;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
  return d;
}

Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      t.emplace_back(static_cast<int>(i), static_cast<int>(col_idx_[k]), values_[k]);
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows_),
                                static_cast<Eigen::Index>(cols_));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// ---------------------------------------------------------------------------------------------

DofMap DofMap::from_free_mask(const std::vector<bool>& free) {
  std::vector<long> map(free.size(), -1);
  long next = 0;
  for (std::size_t i = 0; i < free.size(); ++i)
    if (free[i]) map[i] = next++;
  return DofMap(std::move(map), static_cast<std::size_t>(next));
}

CsrMatrix DofMap::reduce(const CsrMatrix& A, const DofMap& rows, const DofMap& cols) {
  if (A.rows() != rows.full_size() || A.cols() != cols.full_size())
    throw std::invalid_argument("DofMap::reduce: shape mismatch");
  TripletList t(rows.reduced_size(), cols.reduced_size());
  t.reserve(A.nnz());
  const auto rp = A.row_offsets();
  const auto ci = A.col_indices();
  const auto vals = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const long ri = rows[i];
    if (ri < 0) continue;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const long cj = cols[ci[k]];
      if (cj < 0) continue;
      t.add(static_cast<std::size_t>(ri), static_cast<std::size_t>(cj), vals[k]);
    }
  }
  return CsrMatrix::from_triplets(t);
}

Vector DofMap::restrict_vector(const Vector& full) const {
  if (static_cast<std::size_t>(full.size()) != full_size())
    throw std::invalid_argument("DofMap::restrict_vector: size mismatch");
  Vector r = Vector::Zero(static_cast<Eigen::Index>(reduced_size_));
  for (std::size_t i = 0; i < map_.size(); ++i)
    if (map_[i] >= 0) r[map_[i]] += full[static_cast<Eigen::Index>(i)];
  return r;
}

Vector DofMap::prolong(const Vector& reduced) const {
  if (static_cast<std::size_t>(reduced.size()) != reduced_size_)
    throw std::invalid_argument("DofMap::prolong: size mismatch");
  Vector f = Vector::Zero(static_cast<Eigen::Index>(map_.size()));
  for (std::size_t i = 0; i < map_.size(); ++i)
    if (map_[i] >= 0) f[static_cast<Eigen::Index>(i)] = reduced[map_[i]];
  return f;
}

// ---------------------------------------------------------------------------------------------

struct Factorization::Impl {
  MatrixKind kind;
  Eigen::SparseMatrix<double> matrix;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

Factorization::Factorization(const CsrMatrix& A, MatrixKind kind)
    : impl_(std::make_unique<Impl>()), n_(A.rows()) {
  if (A.rows() != A.cols()) throw SolverError("factorization: matrix is not square");
  impl_->kind = kind;
  impl_->matrix = A.to_eigen();
  if (kind == MatrixKind::kSpd) {
    impl_->ldlt.compute(impl_->matrix);
    if (impl_->ldlt.info() != Eigen::Success)
      throw SolverError("factorization: sparse LDL^T failed (matrix singular)");
    const Vector d = impl_->ldlt.vectorD();
    Eigen::Index at = 0;
    const double dmin = d.size() > 0 ? d.minCoeff(&at) : 1.0;
    if (!(dmin > 0.0)) {
      std::ostringstream os;
      os << "factorization: matrix is not SPD (pivot " << dmin << " at permuted index " << at
         << ")";
      throw SolverError(os.str());
    }
  } else {
    impl_->lu.analyzePattern(impl_->matrix);
    impl_->lu.factorize(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success)
      throw SolverError("factorization: sparse LU failed: " + impl_->lu.lastErrorMessage());
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

Vector Factorization::solve(const Vector& rhs) const {
  if (static_cast<std::size_t>(rhs.size()) != n_)
    throw SolverError("solve: right-hand side size mismatch");
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Vector::Zero(rhs.size());
  auto apply = [&](const Vector& b) -> Vector {
    return impl_->kind == MatrixKind::kSpd ? Vector(impl_->ldlt.solve(b))
                                           : Vector(impl_->lu.solve(b));
  };
  Vector x = apply(rhs);
  Vector r = rhs - impl_->matrix * x;
  // Up to two rounds of iterative refinement before giving up.
  for (int round = 0; round < 2 && r.norm() > kSolveTolerance * bnorm; ++round) {
    x += apply(r);
    r = rhs - impl_->matrix * x;
  }
  const double rel = r.norm() / bnorm;
  if (!(rel <= kSolveTolerance)) {
    std::ostringstream os;
    os << "solve: relative residual " << rel << " exceeds " << kSolveTolerance;
    throw SolverError(os.str());
  }
  return x;
}

Vector solve_sparse(const CsrMatrix& A, const Vector& rhs, MatrixKind kind) {
  return Factorization(A, kind).solve(rhs);
}

}  // namespace mlfsi::fem
