// matrix.hpp: small dense complex matrices and state vectors.
//
// Hilbert spaces here are at most a few atoms (dim <= 16), so everything is a
// plain row-major std::vector<complex>. No expression templates, no views.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace floqryd::core {

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols);
  static ComplexMatrix diagonal(std::span<const cplx> diag);
  static ComplexMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  cplx trace() const;
  std::vector<cplx> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const cplx> values);

  bool all_finite() const noexcept;
  /// max |m - m^dagger| over entries; throws DimensionMismatch if not square.
  double hermitian_defect() const;
  double max_abs() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

std::vector<cplx> operator*(const ComplexMatrix& m, std::span<const cplx> v);

/// max_ij |a_ij - b_ij|; dims must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product; result dims are (a.rows*b.rows) x (a.cols*b.cols).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Outer product |a><b|.
ComplexMatrix outer(std::span<const cplx> a, std::span<const cplx> b);

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {}
  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }
  cplx& operator[](std::size_t i) { return amps_[i]; }

  double norm() const noexcept;
  /// Scales to unit norm; a zero vector is left unchanged.
  StateVector& normalize();
  /// <this|other>
  cplx inner(const StateVector& other) const;
  ComplexMatrix projector() const;

 private:
  std::vector<cplx> amps_;
};

// Single-atom operators in the {|g>, |e>} basis (index 0 = g, 1 = e).
namespace pauli {
ComplexMatrix identity();
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
/// |e><e| - |g><g|
ComplexMatrix sigma_z();
/// |e><e|
ComplexMatrix proj_e();
/// |g><g|
ComplexMatrix proj_g();
/// |g><e| (lowering)
ComplexMatrix lower();
}  // namespace pauli

/// Embeds a single-site operator at `site` of an n-site register
/// (site 0 is the most significant tensor factor).
ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::size_t n_sites);

/// "gg", "ge", ... for basis index `index` of n_sites atoms (atom 0 leftmost).
std::string basis_label(std::size_t index, std::size_t n_sites);
/// Number of excited atoms in basis state `index`.
int excitation_count(std::size_t index);

}  // namespace floqryd::core
