#pragma once

#include <vector>

#include "floqryd/core/matrix.hpp"

namespace floqryd::core {

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k pairs with values[k]
};

struct UnitaryEigen {
  std::vector<double> phases;  // in (-pi, pi], ascending
  ComplexMatrix vectors;
};

inline constexpr double kHermitianInputTol = 1e-10;
inline constexpr double kUnitaryInputTol = 1e-8;

/// Cyclic complex Jacobi. Throws NotHermitian when the input asymmetry exceeds
/// `tol` (absolute, entry-wise).
HermitianEigen hermitian_eig(const ComplexMatrix& m, double tol = kHermitianInputTol);

/// Eigen-decomposition of a unitary through the commuting Hermitian pair
/// (u + u^dagger)/2 and (u - u^dagger)/2i. Degenerate clusters of the first are
/// re-diagonalized with the second, so e^{i theta} and e^{-i theta} separate.
UnitaryEigen unitary_eig(const ComplexMatrix& u, double tol = kUnitaryInputTol);

/// Smallest eigenvalue of a Hermitian matrix (positivity monitor).
double min_eigenvalue(const ComplexMatrix& m);

}  // namespace floqryd::core
