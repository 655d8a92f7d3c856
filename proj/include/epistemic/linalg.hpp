#pragma once

// Small dense complex vectors and matrices. The factorizations delegate to
// Eigen; this header keeps Eigen out of the public interface.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace epi {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n);
  // Matrix whose columns are the given vectors (all of equal length).
  static CMatrix from_columns(std::span<const CVector> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  CVector column(std::size_t c) const;
  CMatrix adjoint() const;

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend CVector operator*(const CMatrix& a, const CVector& v);
  friend CMatrix operator+(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator*(cplx s, const CMatrix& a);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// <a|b>, conjugate-linear in the first argument.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> v);
CVector scaled(std::span<const cplx> v, cplx s);

// Frobenius norm of a - b.
double distance(const CMatrix& a, const CMatrix& b);

// Matrix exponential (Pade with scaling and squaring).
CMatrix expm(const CMatrix& a);

// Orthonormalizes `vectors` in order (modified Gram-Schmidt with one
// re-orthogonalization pass). Returns nullopt if some vector is dependent on
// its predecessors, i.e. its residual norm drops below `rank_tol`.
std::optional<std::vector<CVector>> gram_schmidt(std::span<const CVector> vectors,
                                                 double rank_tol);

// Thin QR of a square matrix with R's diagonal made real positive.
void qr_positive(const CMatrix& a, CMatrix& q, CMatrix& r);

// Extends an orthonormal set in C^dim to a full orthonormal basis and returns
// only the added vectors.
std::vector<CVector> orthonormal_complement(std::span<const CVector> vectors,
                                            std::size_t dim);

// True if the smallest eigenvalue of the Hermitian matrix a is >= -tol.
bool is_positive_semidefinite(const CMatrix& a, double tol);

// Hermitian eigen-decomposition; eigenvalues ascending, the columns of
// `vectors` are the matching unit eigenvectors.
void eigh(const CMatrix& a, std::vector<double>& values, CMatrix& vectors);

}  // namespace epi
