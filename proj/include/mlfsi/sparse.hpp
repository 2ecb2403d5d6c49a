#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mlfsi::fem {

using Vector = Eigen::VectorXd;

/// Coordinate-format accumulator. Duplicates are summed when converted to CSR.
class TripletList {
 public:
  TripletList(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void add(std::size_t i, std::size_t j, double v) { entries_.push_back({i, j, v}); }
  void reserve(std::size_t n) { entries_.reserve(n); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  struct Entry {
    std::size_t row, col;
    double value;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::size_t rows_, cols_;
  std::vector<Entry> entries_;
};

/// Compressed sparse row matrix with sorted, duplicate-free column indices per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols);  // zero matrix

  /// Deterministic build: entries are sorted by (row, col, insertion order) before summing.
  static CsrMatrix from_triplets(const TripletList& t);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_ptr_; }
  std::span<const std::size_t> col_indices() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  /// Entry (i, j); zero if not stored.
  double coeff(std::size_t i, std::size_t j) const;

  Vector operator*(const Vector& x) const;
  /// x^T A y.
  double bilinear(const Vector& x, const Vector& y) const;
  double quadratic(const Vector& x) const { return bilinear(x, x); }

  CsrMatrix transpose() const;
  /// max |A - A^T| over all entries.
  double max_asymmetry() const;

  /// a*A + b*B (same shape).
  static CsrMatrix add(double a, const CsrMatrix& A, double b, const CsrMatrix& B);
  CsrMatrix scaled(double s) const;

  Eigen::MatrixXd to_dense() const;
  Eigen::SparseMatrix<double> to_eigen() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Map from a "full" DOF numbering to a reduced unknown numbering. Entries of -1 are
/// eliminated (homogeneous Dirichlet). Several full DOFs may map to the same unknown,
/// which identifies them as one unknown.
class DofMap {
 public:
  DofMap() = default;
  DofMap(std::vector<long> full_to_reduced, std::size_t reduced_size)
      : map_(std::move(full_to_reduced)), reduced_size_(reduced_size) {}

  /// Numbers every DOF whose flag is true consecutively.
  static DofMap from_free_mask(const std::vector<bool>& free);

  std::size_t full_size() const { return map_.size(); }
  std::size_t reduced_size() const { return reduced_size_; }
  long operator[](std::size_t i) const { return map_[i]; }

  /// P^T A Q for selection operators P (rows) and Q (cols).
  static CsrMatrix reduce(const CsrMatrix& A, const DofMap& rows, const DofMap& cols);
  /// P^T b.
  Vector restrict_vector(const Vector& full) const;
  /// P x (eliminated DOFs set to zero).
  Vector prolong(const Vector& reduced) const;

 private:
  std::vector<long> map_;
  std::size_t reduced_size_ = 0;
};

enum class MatrixKind { kSpd, kSymmetricIndefinite, kGeneral };

/// Factorization of a square sparse matrix. SPD matrices use a sparse LDL^T, everything else
/// sparse LU with partial pivoting. Solves are checked against a relative residual of 1e-10.
class Factorization {
 public:
  Factorization(const CsrMatrix& A, MatrixKind kind);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  Vector solve(const Vector& rhs) const;
  std::size_t size() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t n_ = 0;
};

inline constexpr double kSolveTolerance = 1e-10;

/// One-shot factor + solve with residual check.
Vector solve_sparse(const CsrMatrix& A, const Vector& rhs, MatrixKind kind);

}  // namespace mlfsi::fem
