#pragma once

#include <stdexcept>
#include <utility>

#include "privstate/rng.hpp"
#include "privstate/states.hpp"

namespace privstate {

/// Square matrix of independent standard complex Gaussians.
inline Matrix sample_ginibre(int dim, PhiloxRng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  return g;
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the R-diagonal
/// phase correction (Mezzadri normalization).
inline Matrix sample_haar_unitary(int dim, SeedSpec seed) {
  if (dim < 1) throw std::invalid_argument("sample_haar_unitary: dim >= 1 required");
  PhiloxRng rng(seed);
  const Matrix g = sample_ginibre(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= (a > 0.0) ? rjj / a : Complex(1.0, 0.0);
  }
  return q;
}

/// Construction of random orthogonal shield states on A':B': conjugate the
/// complementary projectors onto the first/last d^2/2 computational basis
/// vectors by one Haar unitary and normalize.
inline std::pair<DensityState, DensityState> sample_shield_pair(int d, SeedSpec seed) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("sample_shield_pair: d must be even and >= 2");
  const long n = static_cast<long>(d) * d;
  const long half = n / 2;
  const Matrix u = sample_haar_unitary(static_cast<int>(n), seed);
  Matrix p = Matrix::Zero(n, n);
  for (long i = 0; i < half; ++i) p(i, i) = 1.0;
  const Matrix pperp = Matrix::Identity(n, n) - p;
  SystemLayout layout({{"A'", d}, {"B'", d}});
  DensityState plus(layout, Matrix(u * p * u.adjoint() / static_cast<double>(half)));
  DensityState minus(layout, Matrix(u * pperp * u.adjoint() / static_cast<double>(half)));
  return {plus, minus};
}

/// Random private state: Bell key qubits with the sampled shield pair.
inline PrivateState sample_private_state(int d, SeedSpec seed) {
  auto [plus, minus] = sample_shield_pair(d, seed);
  return private_state(plus, minus);
}

/// GUE matrix projected onto the traceless subspace: off-diagonal entries
/// standard complex normal (unit complex variance), diagonal standard real
/// normal.
inline HermitianOp sample_gue_traceless(int dim, SeedSpec seed) {
  if (dim < 2) throw std::invalid_argument("sample_gue_traceless: dim >= 2 required");
  PhiloxRng rng(seed);
  Matrix h(dim, dim);
  for (int i = 0; i < dim; ++i) {
    h(i, i) = rng.gaussian();
    for (int j = i + 1; j < dim; ++j) {
      const Complex z = rng.complex_gaussian() / std::sqrt(2.0);
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  const Complex tr = h.trace();
  h -= (tr / static_cast<double>(dim)) * Matrix::Identity(dim, dim);
  return HermitianOp(SystemLayout::single("G", dim), h);
}

}  // namespace privstate
