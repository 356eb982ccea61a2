#pragma once

// Phase-point operators and discrete Wigner functions.
//
// Given a sign assignment S, the operator at grid point sigma is
//   What(sigma) = (1/N) sum_{sigma'} omega^{<sigma, sigma'>} S(sigma') D(sigma'),
// and the Wigner function of a state is W_rho(sigma) = (1/N) Tr(rho What(sigma)).
// With that normalization the grid sums to one and summing W over a translate
// of a line reproduces the probability of the corresponding projector, with
// no extra scale factor.

#include "finwig/lines.hpp"
#include "finwig/matrix.hpp"
#include "finwig/phase.hpp"
#include "finwig/ring.hpp"
#include "finwig/signs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace finwig {

inline constexpr double kIdempotencyTol = 1e-10;
inline constexpr double kProbabilityFloor = -1e-10;
inline constexpr double kProbabilitySumTol = 1e-9;

// Checks trace one, Hermiticity, and positive semidefiniteness (least
// eigenvalue above -tol). Throws with the failed property spelled out.
inline void validate_density(const ComplexMatrix& rho, double tol = 1e-10) {
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument("density matrix is not square");
  }
  double herm = hermiticity_error(rho);
  if (herm > tol) {
    throw std::invalid_argument("density matrix is not Hermitian: residual " +
                                std::to_string(herm));
  }
  double tr_err = std::abs(rho.trace() - std::complex<double>(1.0, 0.0));
  if (tr_err > tol) {
    throw std::invalid_argument("density matrix trace differs from 1 by " +
                                std::to_string(tr_err));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho,
                                                      Eigen::EigenvaluesOnly);
  double least = solver.eigenvalues().minCoeff();
  if (least < -tol) {
    throw std::invalid_argument("density matrix has eigenvalue " +
                                std::to_string(least));
  }
}

// The parity operator |q> -> |-q>. For odd N this is exactly What(0,0) under
// the unique sign assignment, which makes it the reference point for checks.
inline ComplexMatrix parity_matrix(int n) {
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (int q = 0; q < n; ++q) p(floor_mod(-q, n), q) = 1.0;
  return p;
}

// What(sigma) for the given signs. The result must be Hermitian, which holds
// exactly when S respects the inversion symmetry S(sigma') = eta S(-sigma');
// an assignment that breaks it is rejected here rather than propagated.
inline ComplexMatrix phase_point_operator(const PhasePoint& sigma,
                                          const SignAssignment& signs) {
  const int n = sigma.n;
  if (signs.n != n) throw std::invalid_argument("signs are off-grid");
  ComplexMatrix w = ComplexMatrix::Zero(n, n);
  for (int qp = 0; qp < n; ++qp) {
    for (int pp = 0; pp < n; ++pp) {
      PhasePoint sp(qp, pp, n);
      const double coeff = signs.sign(sp);
      const long long twist = 2 * symplectic_integer(sigma, sp);
      for (int c = 0; c < n; ++c) {
        w((c + qp) % n, c) +=
            coeff *
            TauPhase(twist + displacement_entry_exponent(sp, c), n).value();
      }
    }
  }
  w /= static_cast<double>(n);
  double herm = hermiticity_error(w);
  if (herm > kHermitianTol) {
    throw std::domain_error(
        "phase-point operator is not Hermitian (residual " +
        std::to_string(herm) + "): signs break inversion symmetry");
  }
  return w;
}

struct WignerGrid {
  int n = 1;
  RealMatrix values;  // values(q, p)

  double sum() const { return values.sum(); }
};

inline WignerGrid wigner_function(const ComplexMatrix& rho,
                                  const SignAssignment& signs) {
  const int n = signs.n;
  validate_density(rho);
  if (rho.rows() != n) {
    throw std::invalid_argument("state dimension does not match the grid");
  }
  WignerGrid grid;
  grid.n = n;
  grid.values.resize(n, n);
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      ComplexMatrix w = phase_point_operator(PhasePoint(q, p, n), signs);
      std::complex<double> v = (rho * w).trace() / static_cast<double>(n);
      if (std::abs(v.imag()) > 1e-9) {
        throw std::logic_error("Wigner value came out complex");
      }
      grid.values(q, p) = v.real();
    }
  }
  return grid;
}

// Position marginal residual: summing W over p must reproduce the diagonal
// of rho. Momentum marginal likewise after a Fourier rotation.
inline double position_marginal_error(const WignerGrid& grid,
                                      const ComplexMatrix& rho) {
  double worst = 0;
  for (int q = 0; q < grid.n; ++q) {
    worst = std::max(worst,
                     std::abs(grid.values.row(q).sum() - rho(q, q).real()));
  }
  return worst;
}

inline double momentum_marginal_error(const WignerGrid& grid,
                                      const ComplexMatrix& rho) {
  const int n = grid.n;
  ComplexMatrix fourier(n, n);
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      fourier(q, p) = TauPhase(2LL * q * p, n).value() / std::sqrt(double(n));
    }
  }
  ComplexMatrix rho_mom = fourier.adjoint() * rho * fourier;
  double worst = 0;
  for (int p = 0; p < n; ++p) {
    worst = std::max(worst,
                     std::abs(grid.values.col(p).sum() - rho_mom(p, p).real()));
  }
  return worst;
}

// Raw sum P = (1/N) sum_{sigma in line} S(sigma) D(sigma) plus its defect
// norms, for callers that want to inspect a failure instead of catching it.
struct ProjectorCheck {
  ComplexMatrix op;
  double idempotency_residual = 0;
  double hermiticity_residual = 0;
};

inline ProjectorCheck line_projector_unchecked(const IsotropicLine& line,
                                               const SignAssignment& signs) {
  const int n = line.n;
  if (signs.n != n) throw std::invalid_argument("signs are off-grid");
  ProjectorCheck out;
  out.op = ComplexMatrix::Zero(n, n);
  for (const PhasePoint& s : line.points) {
    out.op += static_cast<double>(signs.sign(s)) * displacement(s);
  }
  out.op /= static_cast<double>(n);
  out.idempotency_residual = (out.op * out.op - out.op).cwiseAbs().maxCoeff();
  out.hermiticity_residual = hermiticity_error(out.op);
  return out;
}

// The projector onto the joint eigenspace attached to a line. This is a
// projector exactly when S satisfies the product condition on the line; a
// violating S yields a non-idempotent operator and an error carrying the
// residual. That failure mode is the whole story of the two-generator lines
// at even N.
inline ComplexMatrix line_projector(const IsotropicLine& line,
                                    const SignAssignment& signs) {
  ProjectorCheck c = line_projector_unchecked(line, signs);
  if (c.idempotency_residual > kIdempotencyTol) {
    throw std::domain_error("line sum is not idempotent (residual " +
                            std::to_string(c.idempotency_residual) +
                            "): signs violate the line product condition");
  }
  if (c.hermiticity_residual > kHermitianTol) {
    throw std::domain_error("line sum is not Hermitian (residual " +
                            std::to_string(c.hermiticity_residual) + ")");
  }
  return c.op;
}

// Probabilities of the N outcomes of the measurement attached to a bundle:
// entry i is Tr(rho P_i) with P_i the base projector displaced along the
// bundle direction by i steps. Entries are validated to be nonnegative (to
// float fuzz) and to sum to one.
inline std::vector<double> bundle_marginal(const ComplexMatrix& rho,
                                           const LineBundle& b,
                                           const SignAssignment& signs) {
  const int n = b.n;
  validate_density(rho);
  if (rho.rows() != n) {
    throw std::invalid_argument("state dimension does not match the bundle");
  }
  ComplexMatrix p0 = line_projector(b.base, signs);
  std::vector<double> probs(n);
  for (int i = 0; i < n; ++i) {
    ComplexMatrix d = displacement(i * b.direction);
    ComplexMatrix pi = d * p0 * d.adjoint();
    std::complex<double> v = (rho * pi).trace();
    if (std::abs(v.imag()) > 1e-9) {
      throw std::logic_error("marginal probability came out complex");
    }
    probs[i] = v.real();
    if (probs[i] < kProbabilityFloor) {
      throw std::logic_error("marginal probability " + std::to_string(i) +
                             " is negative: " + std::to_string(probs[i]));
    }
  }
  double total = 0;
  for (double v : probs) total += v;
  if (std::abs(total - 1.0) > kProbabilitySumTol) {
    throw std::logic_error("marginal probabilities sum to " +
                           std::to_string(total));
  }
  return probs;
}

}  // namespace finwig
