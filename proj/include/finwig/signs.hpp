#pragma once

// Sign systems over GF(2).
//
// A phase-point operator construction needs a choice of sign S(sigma) = +/-1
// per grid point. Marginal and Hermiticity requirements turn into product
// constraints: unit signs on the axes, S(sigma) = eta_sigma S(-sigma), and on
// every isotropic line S(a)S(b) = tau^{<b,a>} epsilon(b,a) S([a+b]). Writing
// S = (-1)^s these are XOR equations in the bits s, so the whole solution
// theory is Gaussian elimination over GF(2): a unique solution, an affine
// family, or a contradiction with an explicit certificate.

#include "finwig/lines.hpp"
#include "finwig/phase.hpp"
#include "finwig/ring.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace finwig {

// Total assignment of signs to the grid, stored as bits: S = (-1)^bit.
struct SignAssignment {
  int n = 1;
  std::vector<std::uint8_t> bits;  // size n*n, row-major

  SignAssignment() = default;
  explicit SignAssignment(int n_) : n(n_), bits(n_ * n_, 0) {}

  int sign(int q, int p) const { return bits[q * n + p] ? -1 : 1; }
  int sign(const PhasePoint& s) const {
    if (s.n != n) throw std::invalid_argument("sign lookup off-grid");
    return bits[point_index(s)] ? -1 : 1;
  }

  friend bool operator==(const SignAssignment&, const SignAssignment&) =
      default;
};

enum class EquationKind { Unit, Symmetry, Line };

// One XOR constraint: the signs at vars multiply to (-1)^rhs. vars is the
// XOR-reduced support (points appearing an even number of times cancel).
struct SignEquation {
  EquationKind kind = EquationKind::Unit;
  std::vector<int> vars;  // sorted variable indices
  int rhs = 0;
  int line = -1;  // index into the line list that produced it, if any
  PhasePoint a, b;  // the generating pair (Line), point and mirror
                    // (Symmetry), or the pinned point twice (Unit)
};

struct SignSystem {
  int n = 1;
  int num_vars = 1;
  std::vector<SignEquation> equations;
  // Columns in the order the solver should prefer them as pivots. Listing
  // the family's canonical free candidates last is what makes the reported
  // free points land on (1, p0) and (q0, 1) instead of arbitrary grid points.
  std::vector<int> pivot_order;
};

// The free candidates deferred during pivoting: (1, p0) for p0 in [1, N) and
// (q0, 1) for even q0 in [2, N-2]. For N = 2^n these are exactly the points
// the solver leaves free; 3N/2 - 2 of them.
inline std::vector<PhasePoint> canonical_free_candidates(int n) {
  std::vector<PhasePoint> pts;
  for (int p0 = 1; p0 < n; ++p0) pts.emplace_back(1, p0, n);
  for (int q0 = 2; q0 <= n - 2; q0 += 2) pts.emplace_back(q0, 1, n);
  std::sort(pts.begin(), pts.end());
  return pts;
}

inline int free_sign_count(int n) {
  if (!is_power_of_two(n) || n < 2) {
    throw std::invalid_argument("free_sign_count is defined for N = 2^n");
  }
  return 3 * n / 2 - 2;
}

namespace detail {

inline std::vector<int> xor_reduce_vars(std::vector<int> vars) {
  std::sort(vars.begin(), vars.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < vars.size();) {
    std::size_t j = i;
    while (j < vars.size() && vars[j] == vars[i]) ++j;
    if ((j - i) % 2 == 1) out.push_back(vars[i]);
    i = j;
  }
  return out;
}

}  // namespace detail

// Assemble the sign system for a set of lines. Unit equations pin the axes,
// symmetry equations (optional, they are implied by the cyclic lines) encode
// S(sigma) = eta_sigma S(-sigma), and every unordered pair on every line
// contributes a product equation. Equation order is deterministic: units,
// symmetry, cyclic lines, then two-generator lines, so witnesses and solver
// narratives are reproducible.
inline SignSystem build_system(int n, const std::vector<IsotropicLine>& lines,
                               bool include_symmetry = true) {
  check_dimension(n);
  SignSystem sys;
  sys.n = n;
  sys.num_vars = n * n;

  for (int q = 0; q < n; ++q) {
    SignEquation eq;
    eq.kind = EquationKind::Unit;
    eq.a = eq.b = PhasePoint(q, 0, n);
    eq.vars = {point_index(eq.a)};
    sys.equations.push_back(std::move(eq));
  }
  for (int p = 1; p < n; ++p) {
    SignEquation eq;
    eq.kind = EquationKind::Unit;
    eq.a = eq.b = PhasePoint(0, p, n);
    eq.vars = {point_index(eq.a)};
    sys.equations.push_back(std::move(eq));
  }

  if (include_symmetry) {
    for (int idx = 0; idx < n * n; ++idx) {
      PhasePoint s = point_from_index(idx, n);
      PhasePoint m = -s;
      if (point_index(m) < idx) continue;  // each pair once
      SignEquation eq;
      eq.kind = EquationKind::Symmetry;
      eq.a = s;
      eq.b = m;
      eq.rhs = inversion_sign(s) < 0 ? 1 : 0;
      eq.vars = detail::xor_reduce_vars({idx, point_index(m)});
      sys.equations.push_back(std::move(eq));
    }
  }

  auto emit_line = [&sys, n](const IsotropicLine& line, int line_id) {
    if (line.n != n) throw std::invalid_argument("line off-grid");
    const auto& pts = line.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i; j < pts.size(); ++j) {
        const PhasePoint& a = pts[i];
        const PhasePoint& b = pts[j];
        TauPhase t = tau_symplectic(b, a);
        // On an isotropic line the symplectic product vanishes mod N, so the
        // tau power is a genuine sign; anything else is a broken line.
        if (!t.is_real_sign()) {
          throw std::logic_error("tau phase on a line is not a sign");
        }
        SignEquation eq;
        eq.kind = EquationKind::Line;
        eq.line = line_id;
        eq.a = a;
        eq.b = b;
        eq.rhs = (t.sign() < 0) ^ (composition_sign(b, a) < 0);
        eq.vars = detail::xor_reduce_vars(
            {point_index(a), point_index(b), point_index(a + b)});
        sys.equations.push_back(std::move(eq));
      }
    }
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].cyclic()) emit_line(lines[i], static_cast<int>(i));
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].cyclic()) emit_line(lines[i], static_cast<int>(i));
  }

  sys.pivot_order.reserve(sys.num_vars);
  if (n % 2 == 0) {
    std::vector<char> is_candidate(sys.num_vars, 0);
    for (const auto& s : canonical_free_candidates(n)) {
      is_candidate[point_index(s)] = 1;
    }
    for (int c = 0; c < sys.num_vars; ++c) {
      if (!is_candidate[c]) sys.pivot_order.push_back(c);
    }
    for (int c = 0; c < sys.num_vars; ++c) {
      if (is_candidate[c]) sys.pivot_order.push_back(c);
    }
  } else {
    for (int c = 0; c < sys.num_vars; ++c) sys.pivot_order.push_back(c);
  }
  return sys;
}

// Proof that a system has no solution: the listed equations XOR to the empty
// left-hand side with right-hand side 1. The triggering equation is the first
// one (in system order) whose insertion exposed the conflict; for line
// equations the conflict surfaces at the product point a + b.
struct InconsistencyWitness {
  PhasePoint point;
  int triggering_equation = -1;
  std::vector<int> certificate;  // sorted equation indices, trigger included
};

struct SolveOutcome {
  enum class Kind { Unique, Family, Inconsistent };
  Kind kind = Kind::Unique;
  int n = 1;
  int rank = 0;
  SignAssignment particular;            // meaningless when Inconsistent
  std::vector<PhasePoint> free_points;  // sorted row-major
  std::vector<SignAssignment> nullspace_basis;  // aligned with free_points
  std::optional<InconsistencyWitness> witness;

  int nullspace_dimension() const {
    return static_cast<int>(free_points.size());
  }
};

struct SolveOptions {
  // Provenance tracking is what pays for witness certificates. It costs
  // memory proportional to rank * chain length, which only matters for large
  // grids; turning it off still detects inconsistency and reports the
  // triggering equation, just without the full certificate.
  bool track_provenance = true;
};

// Incremental Gaussian elimination over GF(2), keeping the pivot rows fully
// reduced (each row holds its pivot plus free columns only). Inserting an
// equation then needs at most one XOR per pivot already present in its
// support, and a vanished row with rhs 1 yields a contradiction whose
// certificate is the XOR-provenance of the row.
inline SolveOutcome solve(const SignSystem& sys, SolveOptions opts = {}) {
  const int num_vars = sys.num_vars;
  const int words = (num_vars + 63) / 64;

  struct Row {
    std::vector<std::uint64_t> bits;
    std::uint8_t rhs = 0;
    std::vector<std::uint32_t> cert;
    int pivot = -1;
  };
  std::vector<Row> rows;
  std::vector<int> pivot_row_of(num_vars, -1);
  std::vector<int> priority_of(num_vars, 0);
  if (static_cast<int>(sys.pivot_order.size()) != num_vars) {
    throw std::invalid_argument("pivot_order must list every column once");
  }
  for (int rank = 0; rank < num_vars; ++rank) {
    priority_of[sys.pivot_order[rank]] = rank;
  }

  auto xor_into = [&](Row& dst, const Row& src) {
    for (int w = 0; w < words; ++w) dst.bits[w] ^= src.bits[w];
    dst.rhs ^= src.rhs;
    if (opts.track_provenance) {
      std::vector<std::uint32_t> merged;
      merged.reserve(dst.cert.size() + src.cert.size());
      std::set_symmetric_difference(dst.cert.begin(), dst.cert.end(),
                                    src.cert.begin(), src.cert.end(),
                                    std::back_inserter(merged));
      dst.cert = std::move(merged);
    }
  };

  SolveOutcome out;
  out.n = sys.n;

  for (std::size_t e = 0; e < sys.equations.size(); ++e) {
    const SignEquation& eq = sys.equations[e];
    Row row;
    row.bits.assign(words, 0);
    row.rhs = static_cast<std::uint8_t>(eq.rhs & 1);
    if (opts.track_provenance) row.cert = {static_cast<std::uint32_t>(e)};
    for (int v : eq.vars) {
      if (v < 0 || v >= num_vars) {
        throw std::invalid_argument("equation references a bad variable");
      }
      row.bits[v >> 6] ^= 1ULL << (v & 63);
    }

    // Eliminate every pivot column present. Pivot rows never contain other
    // pivot columns, so one pass over the initial support suffices.
    for (int v : eq.vars) {
      if ((row.bits[v >> 6] >> (v & 63)) & 1) {
        if (pivot_row_of[v] != -1) xor_into(row, rows[pivot_row_of[v]]);
      }
    }

    int pivot = -1;
    for (int w = 0; w < words; ++w) {
      std::uint64_t word = row.bits[w];
      while (word) {
        int v = w * 64 + std::countr_zero(word);
        word &= word - 1;
        if (pivot == -1 || priority_of[v] < priority_of[pivot]) pivot = v;
      }
    }

    if (pivot == -1) {
      if (row.rhs == 0) continue;  // redundant equation
      InconsistencyWitness w;
      w.triggering_equation = static_cast<int>(e);
      w.point = eq.kind == EquationKind::Line ? eq.a + eq.b : eq.a;
      w.certificate = std::vector<int>(row.cert.begin(), row.cert.end());
      if (!opts.track_provenance) {
        w.certificate = {static_cast<int>(e)};
      }
      out.kind = SolveOutcome::Kind::Inconsistent;
      out.rank = static_cast<int>(rows.size());
      out.witness = std::move(w);
      return out;
    }

    row.pivot = pivot;
    for (Row& other : rows) {
      if ((other.bits[pivot >> 6] >> (pivot & 63)) & 1) xor_into(other, row);
    }
    pivot_row_of[pivot] = static_cast<int>(rows.size());
    rows.push_back(std::move(row));
  }

  out.rank = static_cast<int>(rows.size());
  out.particular = SignAssignment(sys.n);
  for (const Row& r : rows) out.particular.bits[r.pivot] = r.rhs;

  for (int v = 0; v < num_vars; ++v) {
    if (pivot_row_of[v] == -1) out.free_points.push_back(point_from_index(v, sys.n));
  }
  std::sort(out.free_points.begin(), out.free_points.end());
  for (const PhasePoint& f : out.free_points) {
    SignAssignment basis(sys.n);
    const int fv = point_index(f);
    basis.bits[fv] = 1;
    for (const Row& r : rows) {
      if ((r.bits[fv >> 6] >> (fv & 63)) & 1) basis.bits[r.pivot] = 1;
    }
    out.nullspace_basis.push_back(std::move(basis));
  }
  out.kind = out.free_points.empty() ? SolveOutcome::Kind::Unique
                                     : SolveOutcome::Kind::Family;

  // Self-check: the particular solution must satisfy the original system.
  for (const SignEquation& eq : sys.equations) {
    int acc = 0;
    for (int v : eq.vars) acc ^= out.particular.bits[v];
    if (acc != (eq.rhs & 1)) {
      throw std::logic_error("solver produced a non-solution");
    }
  }
  return out;
}

// Member of the affine solution family selected by one bit per free point
// (bit j flips the sign at free point j, in free_points order).
inline SignAssignment family_member(const SolveOutcome& outcome,
                                    std::uint64_t mask) {
  if (outcome.kind == SolveOutcome::Kind::Inconsistent) {
    throw std::invalid_argument("inconsistent system has no members");
  }
  const int dim = outcome.nullspace_dimension();
  if (dim < 64 && (mask >> dim) != 0) {
    throw std::invalid_argument("family mask has bits beyond the dimension");
  }
  SignAssignment s = outcome.particular;
  for (int j = 0; j < dim && j < 64; ++j) {
    if ((mask >> j) & 1) {
      const auto& basis = outcome.nullspace_basis[j].bits;
      for (std::size_t i = 0; i < s.bits.size(); ++i) s.bits[i] ^= basis[i];
    }
  }
  return s;
}

// The unique solution for odd N in closed form: S(q, p) = (-1)^{qp}.
inline SignAssignment odd_closed_form(int n) {
  if (n % 2 == 0) {
    throw std::invalid_argument("closed form applies to odd N only");
  }
  SignAssignment s(n);
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) s.bits[q * n + p] = (q * p) & 1;
  }
  return s;
}

// Check the propagation relations that determine a family member of even N
// from its free signs: +1 on the axes and at even points, and along each
// cyclic line the odd multiples follow the generator sign with a carry
// factor. Returns false at the first violated relation.
inline bool propagation_check(const SignAssignment& s) {
  const int n = s.n;
  if (n % 2 != 0) {
    throw std::invalid_argument("propagation relations apply to even N");
  }
  for (int q = 0; q < n; ++q) {
    if (s.sign(q, 0) != 1) return false;
  }
  for (int p = 0; p < n; ++p) {
    if (s.sign(0, p) != 1) return false;
  }
  for (int q = 0; q < n; q += 2) {
    for (int p = 0; p < n; p += 2) {
      if (s.sign(q, p) != 1) return false;
    }
  }
  // Lines through (1, p0): sign at (2j+1) * (1, p0) carries a factor for
  // every wrap of the momentum coordinate.
  for (int p0 = 0; p0 < n; ++p0) {
    for (int j = 0; 2 * j + 1 < n; ++j) {
      const int even_p = floor_mod(2LL * j * p0, n);
      int expect = s.sign(1, p0);
      if (((2 * j * p0 - even_p) / n) % 2 != 0) expect = -expect;
      if (p0 + even_p > n - 1) expect = -expect;
      if (s.sign(2 * j + 1, floor_mod((2LL * j + 1) * p0, n)) != expect) {
        return false;
      }
    }
  }
  // Lines through (q0, 1), q0 even: the mirror relation.
  for (int q0 = 0; q0 < n; q0 += 2) {
    for (int k = 0; 2 * k + 1 < n; ++k) {
      const int even_q = floor_mod(2LL * k * q0, n);
      int expect = s.sign(q0, 1);
      if (((2 * k * q0 - even_q) / n) % 2 != 0) expect = -expect;
      if (q0 + even_q > n - 1) expect = -expect;
      if (s.sign(floor_mod((2LL * k + 1) * q0, n), 2 * k + 1) != expect) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace finwig
