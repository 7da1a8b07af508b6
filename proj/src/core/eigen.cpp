#include "floqryd/core/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "floqryd/error.hpp"

namespace floqryd::core {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

double frobenius(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

// Jacobi rotation zeroing a(p,q); applies a <- J^dagger a J and v <- v J.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const cplx apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const cplx phase = apq / r;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * r);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const cplx ph_conj = std::conj(phase);  // e^{-i phi}
  const std::size_t n = a.rows();

  // columns: a J
  for (std::size_t k = 0; k < n; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - s * ph_conj * akq;
    a(k, q) = s * akp + c * ph_conj * akq;
  }
  // rows: J^dagger (a J)
  for (std::size_t k = 0; k < n; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * phase * aqk;
    a(q, k) = s * apk + c * phase * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (std::size_t k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = c * vkp - s * ph_conj * vkq;
    v(k, q) = s * vkp + c * ph_conj * vkq;
  }
}

HermitianEigen sorted(const ComplexMatrix& a, const ComplexMatrix& v) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

double wrap_phase(double theta) {
  if (theta <= -std::numbers::pi) theta += 2.0 * std::numbers::pi;
  if (theta > std::numbers::pi) theta -= 2.0 * std::numbers::pi;
  return theta;
}

}  // namespace

HermitianEigen hermitian_eig(const ComplexMatrix& m, double tol) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "hermitian_eig needs a square matrix");
  const double defect = m.hermitian_defect();
  if (defect > tol) {
    throw Error(ErrorCode::NotHermitian, "asymmetry " + std::to_string(defect) + " exceeds " + std::to_string(tol));
  }
  const std::size_t n = m.rows();
  // Symmetrize so round-off asymmetry below tol does not leak into the rotations.
  ComplexMatrix a = m;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(frobenius(a), 1e-300);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }
  return sorted(a, v);
}

UnitaryEigen unitary_eig(const ComplexMatrix& u, double tol) {
  if (!u.is_square()) throw Error(ErrorCode::DimensionMismatch, "unitary_eig needs a square matrix");
  const std::size_t n = u.rows();
  const ComplexMatrix ud = u.adjoint();
  const double defect = max_abs_diff(ud * u, ComplexMatrix::identity(n));
  if (defect > tol) {
    throw Error(ErrorCode::NotUnitary, "U^dagger U deviates from identity by " + std::to_string(defect));
  }
  const ComplexMatrix re_part = (u + ud) * cplx{0.5, 0.0};
  const ComplexMatrix im_part = (u - ud) * cplx{0.0, -0.5};

  const HermitianEigen first = hermitian_eig(re_part, 1e-6);
  ComplexMatrix vectors = first.vectors;

  constexpr double kClusterGap = 1e-5;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && first.values[end] - first.values[end - 1] < kClusterGap) ++end;
    const std::size_t k = end - start;
    if (k > 1) {
      // Restrict the imaginary part to the cluster subspace and diagonalize it there.
      ComplexMatrix basis(n, k);
      for (std::size_t c = 0; c < k; ++c) basis.set_column(c, vectors.column(start + c));
      ComplexMatrix restricted = basis.adjoint() * im_part * basis;
      const HermitianEigen sub = hermitian_eig(restricted, 1e-6);
      const ComplexMatrix rotated = basis * sub.vectors;
      for (std::size_t c = 0; c < k; ++c) vectors.set_column(start + c, rotated.column(c));
    }
    start = end;
  }

  std::vector<double> phases(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto col = vectors.column(c);
    const auto ucol = u * std::span<const cplx>(col);
    cplx rq{};
    for (std::size_t r = 0; r < n; ++r) rq += std::conj(col[r]) * ucol[r];
    phases[c] = wrap_phase(std::arg(rq));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return phases[i] < phases[j]; });
  UnitaryEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.phases[k] = phases[order[k]];
    out.vectors.set_column(k, vectors.column(order[k]));
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& m) { return hermitian_eig(m, 1e-6).values.front(); }

}  // namespace floqryd::core
