#pragma once

// State tomography from line-bundle measurements.
//
// Each bundleable line contributes the N projectors of its translate family;
// dropping the i = 0 member and subtracting I/N makes each remaining operator
// traceless. Collected over all bundleable lines these span the traceless
// Hermitian operators (rank N^2 - 1), so probabilities of the bundle outcomes
// determine the state. Reconstruction solves the Gram-matrix normal system
// with a truncated pseudo-inverse; overcompleteness is harmless because any
// Gram-kernel component corresponds to the zero operator.

#include "finwig/lines.hpp"
#include "finwig/matrix.hpp"
#include "finwig/phase.hpp"
#include "finwig/signs.hpp"
#include "finwig/wigner.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace finwig {

struct TomoFrame {
  int n = 1;
  std::vector<int> line_ids;          // bundleable lines, in input order
  std::vector<LineBundle> bundles;    // aligned with line_ids
  // projectors[k][i] projects onto translate i of bundle k.
  std::vector<std::vector<ComplexMatrix>> projectors;
  std::vector<ComplexMatrix> ops;     // traceless frame, flattened
  std::vector<std::pair<int, int>> labels;  // (line_id, shift >= 1) per op
};

// Builds the frame for every line that admits a bundle. Lines without a
// translate direction (the two-generator ones) are skipped; everything else
// must yield a genuine projector or the signs are inconsistent and the error
// from line_projector propagates.
inline TomoFrame build_frame(const std::vector<IsotropicLine>& lines,
                             const SignAssignment& signs) {
  TomoFrame frame;
  frame.n = signs.n;
  const ComplexMatrix id_over_n =
      ComplexMatrix::Identity(signs.n, signs.n) / double(signs.n);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    LineBundle b;
    try {
      b = bundle(lines[li], static_cast<int>(li));
    } catch (const std::invalid_argument&) {
      continue;  // no translate direction; not measurable this way
    }
    ComplexMatrix p0 = line_projector(lines[li], signs);
    std::vector<ComplexMatrix> projs(frame.n);
    for (int i = 0; i < frame.n; ++i) {
      ComplexMatrix d = displacement(i * b.direction);
      projs[i] = d * p0 * d.adjoint();
      if (i >= 1) {
        ComplexMatrix t = projs[i] - id_over_n;
        if (std::abs(t.trace()) > 1e-10) {
          throw std::logic_error("frame operator is not traceless");
        }
        frame.ops.push_back(std::move(t));
        frame.labels.emplace_back(static_cast<int>(li), i);
      }
    }
    frame.line_ids.push_back(static_cast<int>(li));
    frame.bundles.push_back(std::move(b));
    frame.projectors.push_back(std::move(projs));
  }
  if (frame.ops.empty()) {
    throw std::invalid_argument("no bundleable lines: empty frame");
  }
  return frame;
}

inline int frame_rank(const TomoFrame& frame, double rel_tol = 1e-8) {
  return gram_rank(frame.ops, rel_tol);
}

// Outcome probabilities of every bundle measurement on rho, indexed
// [bundle][shift] with shift in [0, N). Exact Born-rule values; feed these
// to reconstruct for a round trip.
inline std::vector<std::vector<double>> exact_probabilities(
    const ComplexMatrix& rho, const TomoFrame& frame) {
  validate_density(rho);
  if (rho.rows() != frame.n) {
    throw std::invalid_argument("state dimension does not match the frame");
  }
  std::vector<std::vector<double>> probs(frame.projectors.size());
  for (std::size_t k = 0; k < frame.projectors.size(); ++k) {
    probs[k].resize(frame.n);
    for (int i = 0; i < frame.n; ++i) {
      probs[k][i] = (rho * frame.projectors[k][i]).trace().real();
    }
  }
  return probs;
}

// Least-squares state estimate from bundle probabilities. Requires the frame
// to span the traceless space (rank N^2 - 1); rank deficiency means some
// direction of state space is unmeasured and reconstruction must refuse.
inline ComplexMatrix reconstruct(
    const TomoFrame& frame, const std::vector<std::vector<double>>& probs) {
  const int n = frame.n;
  if (probs.size() != frame.projectors.size()) {
    throw std::invalid_argument("probability table shape mismatch");
  }
  for (const auto& row : probs) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("probability row length mismatch");
    }
    double total = 0;
    for (double v : row) {
      if (v < -1e-6 || v > 1.0 + 1e-6) {
        throw std::invalid_argument("probability out of range: " +
                                    std::to_string(v));
      }
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw std::invalid_argument("bundle probabilities sum to " +
                                  std::to_string(total));
    }
  }

  const int expected = n * n - 1;
  int rank = frame_rank(frame);
  if (rank < expected) {
    throw std::domain_error("frame rank " + std::to_string(rank) +
                            " below " + std::to_string(expected) +
                            ": reconstruction is underdetermined");
  }

  // Tr(rho T_j) = sum_k c_k Tr(T_k T_j) once rho = I/N + sum c_k T_k, so the
  // normal system is the Gram matrix itself.
  RealMatrix gram = gram_matrix(frame.ops);
  RealVector rhs(frame.ops.size());
  for (std::size_t j = 0; j < frame.ops.size(); ++j) {
    auto [line_id, shift] = frame.labels[j];
    std::size_t k = 0;
    while (frame.line_ids[k] != line_id) ++k;
    rhs(static_cast<Eigen::Index>(j)) = probs[k][shift] - 1.0 / n;
  }
  RealVector c = least_squares_solve(gram, rhs);

  ComplexMatrix rho_hat = ComplexMatrix::Identity(n, n) / double(n);
  for (std::size_t k = 0; k < frame.ops.size(); ++k) {
    rho_hat += c(static_cast<Eigen::Index>(k)) * frame.ops[k];
  }
  return rho_hat;
}

}  // namespace finwig
