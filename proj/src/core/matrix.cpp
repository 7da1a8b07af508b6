#include "floqryd/core/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "floqryd/error.hpp"

namespace floqryd::core {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::DimensionMismatch, "entry count does not match rows x cols");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols); }

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

std::vector<cplx> ComplexMatrix::column(std::size_t c) const {
  std::vector<cplx> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void ComplexMatrix::set_column(std::size_t c, std::span<const cplx> values) {
  if (values.size() != rows_) throw Error(ErrorCode::DimensionMismatch, "set_column");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double ComplexMatrix::hermitian_defect() const {
  if (!is_square()) throw Error(ErrorCode::DimensionMismatch, "hermitian_defect of non-square matrix");
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return worst;
}

double ComplexMatrix::max_abs() const noexcept {
  double worst = 0.0;
  for (const auto& z : data_) worst = std::max(worst, std::abs(z));
  return worst;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

std::vector<cplx> operator*(const ComplexMatrix& m, std::span<const cplx> v) {
  if (m.cols() != v.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  std::vector<cplx> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    cplx acc{};
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx s = a(ar, ac);
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

ComplexMatrix outer(std::span<const cplx> a, std::span<const cplx> b) {
  ComplexMatrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = a[i] * std::conj(b[j]);
  return out;
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw Error(ErrorCode::IndexOutOfRange, "basis index");
  std::vector<cplx> v(dim);
  v[index] = 1.0;
  return StateVector(std::move(v));
}

double StateVector::norm() const noexcept {
  double s = 0.0;
  for (const auto& z : amps_) s += std::norm(z);
  return std::sqrt(s);
}

StateVector& StateVector::normalize() {
  const double n = norm();
  if (n > 0.0)
    for (auto& z : amps_) z /= n;
  return *this;
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "inner product");
  cplx acc{};
  for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
  return acc;
}

ComplexMatrix StateVector::projector() const { return outer(amps_, amps_); }

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix sigma_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix sigma_y() { return {{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}}; }
ComplexMatrix sigma_z() { return {{-1.0, 0.0}, {0.0, 1.0}}; }
ComplexMatrix proj_e() { return {{0.0, 0.0}, {0.0, 1.0}}; }
ComplexMatrix proj_g() { return {{1.0, 0.0}, {0.0, 0.0}}; }
ComplexMatrix lower() { return {{0.0, 1.0}, {0.0, 0.0}}; }
}  // namespace pauli

ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::size_t n_sites) {
  if (site >= n_sites) throw Error(ErrorCode::IndexOutOfRange, "embed site");
  ComplexMatrix out = site == 0 ? op : ComplexMatrix::identity(2);
  for (std::size_t s = 1; s < n_sites; ++s) out = kron(out, s == site ? op : ComplexMatrix::identity(2));
  return out;
}

std::string basis_label(std::size_t index, std::size_t n_sites) {
  std::string out(n_sites, 'g');
  for (std::size_t i = 0; i < n_sites; ++i)
    if ((index >> (n_sites - 1 - i)) & 1U) out[i] = 'e';
  return out;
}

int excitation_count(std::size_t index) { return std::popcount(index); }

}  // namespace floqryd::core
