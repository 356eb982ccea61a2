#pragma once

// Thin numerical layer over Eigen: Hermitian spectra, Frobenius pairings,
// Gram ranks, and the truncated-SVD least squares used by tomography.
// Nothing here knows about phase space; it is shared plumbing.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace finwig {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;

// Real eigenvalues sorted descending. Spectra are compared entrywise with an
// absolute tolerance; two spectra within tolerance of each other are the same
// point of the census.
struct Spectrum {
  std::vector<double> values;
  double tolerance = 1e-9;

  bool approx_equal(const Spectrum& other) const {
    if (values.size() != other.values.size()) return false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::abs(values[i] - other.values[i]) > tolerance) return false;
    }
    return true;
  }

  double sum() const {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }

  double squared_norm() const {
    double s = 0;
    for (double v : values) s += v * v;
    return s;
  }
};

inline double hermiticity_error(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Eigenvalues of a Hermitian matrix, descending. Rejects inputs that are not
// Hermitian to within tol instead of silently symmetrizing them: a
// non-Hermitian matrix arriving here means an upstream sign assignment or
// operator construction is broken, and that must surface.
inline Spectrum hermitian_eigenvalues(const ComplexMatrix& m,
                                      double tol = kHermitianTol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix is not square");
  }
  double err = hermiticity_error(m);
  if (err > tol) {
    throw std::invalid_argument("matrix is not Hermitian: residual " +
                                std::to_string(err));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m,
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue iteration failed to converge");
  }
  Spectrum s;
  s.values.assign(solver.eigenvalues().data(),
                  solver.eigenvalues().data() + m.rows());
  std::reverse(s.values.begin(), s.values.end());
  return s;
}

// Frobenius inner product Tr(A^dagger B).
inline std::complex<double> trace_inner(const ComplexMatrix& a,
                                        const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("trace_inner: shape mismatch");
  }
  return a.conjugate().cwiseProduct(b).sum();
}

inline RealMatrix gram_matrix(const std::vector<ComplexMatrix>& ops) {
  const auto k = static_cast<Eigen::Index>(ops.size());
  RealMatrix g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      double v = trace_inner(ops[i], ops[j]).real();
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

// Numerical rank of the span of a set of operators, computed from the
// eigenvalues of their (positive semidefinite) Gram matrix. An eigenvalue
// counts while it exceeds rel_tol times the largest one.
inline int gram_rank(const std::vector<ComplexMatrix>& ops,
                     double rel_tol = 1e-8) {
  if (ops.empty()) return 0;
  RealMatrix g = gram_matrix(ops);
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Gram eigenvalue iteration failed");
  }
  double top = solver.eigenvalues().maxCoeff();
  if (top <= 0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if (solver.eigenvalues()(i) > rel_tol * top) ++rank;
  }
  return rank;
}

// Minimum-norm least squares via SVD with relative threshold truncation.
// Singular values below rel_tol * s_max are treated as exact zeros, so a
// consistent rank-deficient system still solves cleanly.
inline RealVector least_squares_solve(const RealMatrix& a, const RealVector& b,
                                      double rel_tol = 1e-10) {
  if (a.rows() < a.cols()) {
    throw std::invalid_argument("least_squares_solve wants rows >= cols");
  }
  if (a.rows() != b.size()) {
    throw std::invalid_argument("least_squares_solve: rhs length mismatch");
  }
  Eigen::JacobiSVD<RealMatrix> svd(a,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rel_tol);
  return svd.solve(b);
}

// Haar-ish random pure state: complex Gaussian vector, normalized.
inline ComplexVector random_pure_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {gauss(rng), gauss(rng)};
  v.normalize();
  return v;
}

// Random full-rank density matrix from the Ginibre ensemble: G G^dagger
// normalized to unit trace. Hermitian and positive by construction.
inline ComplexMatrix random_density_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) g(r, c) = {gauss(rng), gauss(rng)};
  }
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  // Round off the tiny anti-Hermitian dust from the products so downstream
  // validation at 1e-10 never trips on the generator itself.
  return (rho + rho.adjoint()) / 2.0;
}

}  // namespace finwig
