#pragma once

// Displacement operators on Z_N and their cocycle bookkeeping.
//
// The primitive phase is tau = exp(i pi / N), a 2N-th root of unity. Every
// phase in the algebra is an integer power of tau, so this module carries
// phases as integer exponents mod 2N and only converts to complex numbers
// when a matrix entry is materialized. That keeps all sign computations
// exact: whether a phase is +1 or -1 is integer arithmetic, never a float
// comparison.

#include "finwig/matrix.hpp"
#include "finwig/ring.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace finwig {

// tau^exponent with the exponent canonical in [0, 2N). tau^N = -1, so an
// exponent is a real sign iff it is 0 or N.
struct TauPhase {
  int exponent = 0;
  int n = 1;

  TauPhase() = default;
  TauPhase(long long e, int n_) {
    if (n_ < 1) throw std::invalid_argument("TauPhase modulus must be >= 1");
    n = n_;
    exponent = floor_mod(e, 2 * n_);
  }

  bool is_real_sign() const { return exponent == 0 || exponent == n; }

  int sign() const {
    if (exponent == 0) return 1;
    if (exponent == n) return -1;
    throw std::domain_error("tau^" + std::to_string(exponent) +
                            " is not a real sign for N=" + std::to_string(n));
  }

  std::complex<double> value() const {
    return std::polar(1.0, std::numbers::pi * exponent / n);
  }

  friend TauPhase operator*(const TauPhase& a, const TauPhase& b) {
    if (a.n != b.n) throw std::invalid_argument("TauPhase modulus mismatch");
    return TauPhase(static_cast<long long>(a.exponent) + b.exponent, a.n);
  }

  friend bool operator==(const TauPhase&, const TauPhase&) = default;
};

// tau raised to the (integer-valued) symplectic product <a, b>. The exponent
// matters mod 2N while the product is only canonical mod N, so this must be
// computed from the un-reduced integer form; combined with the composition
// sign below the total phase is well defined.
inline TauPhase tau_symplectic(const PhasePoint& a, const PhasePoint& b) {
  return TauPhase(symplectic_integer(a, b), a.n);
}

namespace detail {

inline void check_sign_agreement(int from_cases, const TauPhase& from_tau,
                                 const char* what) {
  // Both closed forms are implemented independently on purpose; if they ever
  // disagree the phase conventions drifted and nothing downstream can be
  // trusted, so fail hard rather than pick one.
  if (!from_tau.is_real_sign() || from_tau.sign() != from_cases) {
    throw std::logic_error(std::string(what) +
                           ": case table and tau exponent disagree");
  }
}

}  // namespace detail

// Sign eta_sigma relating a displacement to its inverse:
// D(sigma)^{-1} = eta_sigma D([-sigma]). It is +1 on the axes and
// (-1)^{q+p+N} elsewhere; equivalently tau^{qp - [N-q][N-p]}.
inline int inversion_sign(const PhasePoint& sigma) {
  const int n = sigma.n, q = sigma.q, p = sigma.p;
  int from_cases = (q == 0 || p == 0) ? 1 : ((q + p + n) % 2 == 0 ? 1 : -1);
  long long mq = floor_mod(n - q, n), mp = floor_mod(n - p, n);
  TauPhase from_tau(static_cast<long long>(q) * p - mq * mp, n);
  detail::check_sign_agreement(from_cases, from_tau, "inversion_sign");
  return from_cases;
}

// Sign epsilon(a, b) produced when two displacements compose:
// D(a) D(b) = tau^{<a,b>} epsilon(a, b) D([a + b]).
// It records, through the carries of the coordinate sums, the mismatch
// between tau^{(q'+q)(p'+p)} and tau^{[q'+q][p'+p]}. Symmetric in its
// arguments, and identically +1 when neither coordinate sum wraps.
inline int composition_sign(const PhasePoint& a, const PhasePoint& b) {
  require_same_grid(a, b);
  const int n = a.n;
  const int qs = a.q + b.q, ps = a.p + b.p;
  const int carry_q = qs >= n ? 1 : 0, carry_p = ps >= n ? 1 : 0;
  int parity = carry_q * ps + carry_p * qs + carry_q * carry_p * n;
  int from_cases = parity % 2 == 0 ? 1 : -1;
  TauPhase from_tau(
      static_cast<long long>(qs) * ps -
          static_cast<long long>(floor_mod(qs, n)) * floor_mod(ps, n),
      n);
  detail::check_sign_agreement(from_cases, from_tau, "composition_sign");
  return from_cases;
}

// Clock and shift pair: U = diag(omega^q) with omega = tau^2, and V the
// cyclic shift taking |q> to |q+1>. They satisfy U^p V^q = omega^{pq} V^q U^p.
inline std::pair<ComplexMatrix, ComplexMatrix> weyl_matrices(int n) {
  if (n < 1) throw std::invalid_argument("weyl_matrices requires n >= 1");
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (int q = 0; q < n; ++q) {
    u(q, q) = TauPhase(2 * q, n).value();
    v((q + 1) % n, q) = 1.0;
  }
  return {u, v};
}

// Entry phase exponent of the displacement operator: column c of D(q, p)
// holds tau^{qp + 2pc} at row [c + q].
inline int displacement_entry_exponent(const PhasePoint& sigma, int col) {
  return floor_mod(
      static_cast<long long>(sigma.q) * sigma.p +
          2LL * sigma.p * col,
      2 * sigma.n);
}

// D(q, p) = tau^{qp} V^q U^p, the projective Weyl representation of the
// translation group of the grid. Unitary; D(0, 0) is the identity.
inline ComplexMatrix displacement(const PhasePoint& sigma) {
  const int n = sigma.n;
  ComplexMatrix d = ComplexMatrix::Zero(n, n);
  for (int c = 0; c < n; ++c) {
    d((c + sigma.q) % n, c) =
        TauPhase(displacement_entry_exponent(sigma, c), n).value();
  }
  return d;
}

}  // namespace finwig
