#include "epistemic/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace epi {

namespace {

Eigen::MatrixXcd to_eigen(const CMatrix& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

CMatrix from_eigen(const Eigen::MatrixXcd& m) {
  CMatrix a(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  return a;
}

}  // namespace

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::from_columns(std::span<const CVector> columns) {
  if (columns.empty()) return {};
  CMatrix m(columns.front().size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    assert(columns[c].size() == m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = columns[c][r];
  }
  return m;
}

CVector CMatrix::column(std::size_t c) const {
  CVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  assert(a.cols() == b.rows());
  CMatrix m(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
    }
  return m;
}

CVector operator*(const CMatrix& a, const CVector& v) {
  assert(a.cols() == v.size());
  CVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) out[i] += a(i, k) * v[k];
  return out;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  CMatrix m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) + b(i, j);
  return m;
}

CMatrix operator*(cplx s, const CMatrix& a) {
  CMatrix m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = s * a(i, j);
  return m;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  assert(a.size() == b.size());
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm(std::span<const cplx> v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

CVector scaled(std::span<const cplx> v, cplx s) {
  CVector out(v.begin(), v.end());
  for (auto& z : out) z *= s;
  return out;
}

double distance(const CMatrix& a, const CMatrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) acc += std::norm(a(i, j) - b(i, j));
  return std::sqrt(acc);
}

CMatrix expm(const CMatrix& a) { return from_eigen(to_eigen(a).exp().eval()); }

std::optional<std::vector<CVector>> gram_schmidt(std::span<const CVector> vectors,
                                                 double rank_tol) {
  std::vector<CVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    CVector w = v;
    const double original = norm(w);
    if (original == 0.0) return std::nullopt;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) {
        const cplx proj = inner(q, w);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= proj * q[i];
      }
    const double residual = norm(w);
    if (residual < rank_tol * std::max(1.0, original)) return std::nullopt;
    for (auto& z : w) z /= residual;
    out.push_back(std::move(w));
  }
  return out;
}

void qr_positive(const CMatrix& a, CMatrix& q, CMatrix& r) {
  assert(a.rows() == a.cols());
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(to_eigen(a));
  Eigen::MatrixXcd qe = qr.householderQ();
  Eigen::MatrixXcd re = qr.matrixQR().triangularView<Eigen::Upper>();
  // Move the phase of each diagonal entry of R into the matching column of Q.
  for (Eigen::Index k = 0; k < re.rows(); ++k) {
    const cplx d = re(k, k);
    const cplx phase = std::abs(d) > 0.0 ? d / std::abs(d) : cplx(1.0);
    qe.col(k) *= phase;
    re.row(k) *= std::conj(phase);
  }
  q = from_eigen(qe);
  r = from_eigen(re);
}

std::vector<CVector> orthonormal_complement(std::span<const CVector> vectors,
                                            std::size_t dim) {
  std::vector<CVector> basis(vectors.begin(), vectors.end());
  std::vector<CVector> added;
  for (std::size_t k = 0; k < dim && basis.size() < dim; ++k) {
    CVector w(dim);
    w[k] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) {
        const cplx proj = inner(q, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * q[i];
      }
    const double len = norm(w);
    // Any unit vector orthogonal to the set has residual >= 1/sqrt(dim) against
    // at least one standard basis vector; smaller residuals are skipped.
    if (len < 0.5 / std::sqrt(static_cast<double>(dim))) continue;
    for (auto& z : w) z /= len;
    basis.push_back(w);
    added.push_back(std::move(w));
  }
  return added;
}

bool is_positive_semidefinite(const CMatrix& a, double tol) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a), Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() >= -tol;
}

void eigh(const CMatrix& a, std::vector<double>& values, CMatrix& vectors) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
  values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  vectors = from_eigen(es.eigenvectors());
}

}  // namespace epi
