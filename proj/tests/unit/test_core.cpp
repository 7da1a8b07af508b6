#include <gtest/gtest.h>

#include <cmath>

#include "floqryd/core/bessel.hpp"
#include "floqryd/core/eigen.hpp"
#include "floqryd/core/matrix.hpp"
#include "floqryd/error.hpp"

using namespace floqryd;
using core::cplx;

TEST(Bessel, TabulatedValues) {
  EXPECT_NEAR(core::bessel_j(0, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(core::bessel_j(1, 0.0), 0.0, 1e-14);
  EXPECT_NEAR(core::bessel_j(0, 1.0), 0.7651976865579666, 1e-12);
  EXPECT_NEAR(core::bessel_j(1, 1.0), 0.4400505857449335, 1e-12);
  EXPECT_NEAR(core::bessel_j(0, 10.0), -0.2459357644513483, 1e-12);
  EXPECT_NEAR(core::bessel_j(3, 7.0), -0.1675555879953343, 1e-12);
}

TEST(Bessel, NegativeOrderAndArgumentSymmetry) {
  for (double x : {0.3, 2.0, 6.9, 11.1}) {
    EXPECT_NEAR(core::bessel_j(-1, x), -core::bessel_j(1, x), 1e-13);
    EXPECT_NEAR(core::bessel_j(-2, x), core::bessel_j(2, x), 1e-13);
    EXPECT_NEAR(core::bessel_j(1, -x), -core::bessel_j(1, x), 1e-13);
  }
}

TEST(Bessel, RecurrenceHolds) {
  // J_{m-1}(x) + J_{m+1}(x) = (2m/x) J_m(x)
  for (double x : {0.5, 2.4, 5.5, 11.2, 20.0})
    for (int m = 1; m < 10; ++m)
      EXPECT_NEAR(core::bessel_j(m - 1, x) + core::bessel_j(m + 1, x), 2.0 * m / x * core::bessel_j(m, x), 1e-12);
}

TEST(Bessel, Zeros) {
  EXPECT_NEAR(core::bessel_j_zero(0, 1), 2.404825557695773, 1e-10);
  EXPECT_NEAR(core::bessel_j_zero(0, 2), 5.520078110286311, 1e-10);
  EXPECT_NEAR(core::bessel_j_zero(1, 1), 3.831705970207512, 1e-10);
  EXPECT_NEAR(core::bessel_j_zero(1, 2), 7.015586669815619, 1e-10);
}

TEST(Bessel, BisectNeedsBracket) {
  EXPECT_THROW(core::bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), Error);
  EXPECT_NEAR(core::bisect([](double x) { return x - 0.25; }, 0.0, 1.0), 0.25, 1e-13);
}

TEST(Matrix, KronAndEmbed) {
  const auto zz = core::kron(core::pauli::sigma_z(), core::pauli::sigma_z());
  EXPECT_EQ(zz.rows(), 4u);
  EXPECT_NEAR(zz(0, 0).real(), 1.0, 0);
  EXPECT_NEAR(zz(1, 1).real(), -1.0, 0);
  EXPECT_NEAR(zz(3, 3).real(), 1.0, 0);
  // Atom 0 is the most significant bit.
  const auto pe0 = core::embed(core::pauli::proj_e(), 0, 2);
  EXPECT_NEAR(pe0(2, 2).real(), 1.0, 0);
  EXPECT_NEAR(pe0(1, 1).real(), 0.0, 0);
  EXPECT_EQ(core::basis_label(1, 2), "ge");
  EXPECT_EQ(core::basis_label(2, 2), "eg");
  EXPECT_EQ(core::excitation_count(7), 3);
}

TEST(Eigen, HermitianSpectrumOfPauliX) {
  const auto e = core::hermitian_eig(core::pauli::sigma_x());
  ASSERT_EQ(e.values.size(), 2u);
  EXPECT_NEAR(e.values[0], -1.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.0, 1e-12);
}

TEST(Eigen, HermitianReconstruction) {
  core::ComplexMatrix m{{2.0, cplx(0.5, -0.3), 0.1}, {cplx(0.5, 0.3), -1.0, cplx(0, 0.2)}, {0.1, cplx(0, -0.2), 0.7}};
  const auto e = core::hermitian_eig(m);
  core::ComplexMatrix d = core::ComplexMatrix::diagonal(std::span<const double>(e.values));
  const auto back = e.vectors * d * e.vectors.adjoint();
  EXPECT_LT(core::max_abs_diff(back, m), 1e-11);
}

TEST(Eigen, RejectsNonHermitian) {
  core::ComplexMatrix m{{1.0, 1.0}, {0.0, 1.0}};
  EXPECT_THROW(core::hermitian_eig(m), Error);
}

TEST(Eigen, UnitaryPhases) {
  const double a = 0.7, b = -2.1;
  core::ComplexMatrix u{{std::polar(1.0, a), 0.0}, {0.0, std::polar(1.0, b)}};
  const auto e = core::unitary_eig(u);
  EXPECT_NEAR(e.phases[0], b, 1e-12);
  EXPECT_NEAR(e.phases[1], a, 1e-12);
}

TEST(Eigen, MinEigenvalue) {
  core::ComplexMatrix m{{1.0, 0.0}, {0.0, -0.25}};
  EXPECT_NEAR(core::min_eigenvalue(m), -0.25, 1e-12);
}
