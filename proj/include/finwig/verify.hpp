#pragma once

// Invariant battery behind the `verify` subcommand: every law the algebra
// promises, checked numerically at a given N. Exhaustive where the dimension
// allows, randomly sampled where it does not; each check reports the worst
// residual it saw. A failure here means the build is wrong, not the input.

#include "finwig/lines.hpp"
#include "finwig/matrix.hpp"
#include "finwig/phase.hpp"
#include "finwig/ring.hpp"
#include "finwig/signs.hpp"
#include "finwig/spectra.hpp"
#include "finwig/tomography.hpp"
#include "finwig/wigner.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace finwig {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

template <typename Fn>
void run_check(VerificationReport& report, const std::string& name, Fn&& fn) {
  CheckResult r;
  r.name = name;
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  report.checks.push_back(std::move(r));
}

inline std::vector<PhasePoint> sample_points(int n, std::size_t count,
                                             std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::vector<PhasePoint> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    pts.emplace_back(coord(rng), coord(rng), n);
  }
  return pts;
}

inline std::vector<PhasePoint> all_points(int n) {
  std::vector<PhasePoint> pts;
  pts.reserve(n * n);
  for (int idx = 0; idx < n * n; ++idx) pts.push_back(point_from_index(idx, n));
  return pts;
}

}  // namespace detail

inline VerificationReport run_verification(int n, std::uint64_t seed) {
  check_dimension(n);
  VerificationReport report;
  report.n = n;
  report.seed = seed;
  std::mt19937_64 rng(seed);

  const bool small = n <= 8;      // exhaustive pair budgets
  const bool medium = n <= 16;    // full operator batteries

  auto lines = enumerate_lines(n);

  detail::run_check(report, "weyl_commutation", [&](CheckResult& r) {
    auto [u, v] = weyl_matrices(n);
    double worst = 0;
    auto check_pair = [&](int p, int q) {
      ComplexMatrix up = ComplexMatrix::Identity(n, n);
      for (int i = 0; i < p; ++i) up = up * u;
      ComplexMatrix vq = ComplexMatrix::Identity(n, n);
      for (int i = 0; i < q; ++i) vq = vq * v;
      std::complex<double> omega_pq = TauPhase(2LL * p * q, n).value();
      worst = std::max(worst,
                       (up * vq - omega_pq * vq * up).cwiseAbs().maxCoeff());
    };
    if (n <= 12) {
      for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) check_pair(p, q);
      }
      r.detail = "exhaustive, worst residual " + detail::fmt(worst);
    } else {
      std::uniform_int_distribution<int> coord(0, n - 1);
      for (int i = 0; i < 100; ++i) check_pair(coord(rng), coord(rng));
      r.detail = "100 samples, worst residual " + detail::fmt(worst);
    }
    r.pass = worst <= 1e-12;
  });

  detail::run_check(report, "displacement_unitarity", [&](CheckResult& r) {
    auto pts = medium ? detail::all_points(n) : detail::sample_points(n, 128, rng);
    double worst = 0;
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    for (const auto& s : pts) {
      ComplexMatrix d = displacement(s);
      worst = std::max(worst, (d.adjoint() * d - id).cwiseAbs().maxCoeff());
    }
    r.pass = worst <= 1e-12;
    r.detail = std::to_string(pts.size()) + " points, worst residual " +
               detail::fmt(worst);
  });

  detail::run_check(report, "displacement_composition", [&](CheckResult& r) {
    std::vector<std::pair<PhasePoint, PhasePoint>> pairs;
    if (small) {
      for (const auto& a : detail::all_points(n)) {
        for (const auto& b : detail::all_points(n)) pairs.emplace_back(a, b);
      }
    } else {
      for (int i = 0; i < 1000; ++i) {
        auto s = detail::sample_points(n, 2, rng);
        pairs.emplace_back(s[0], s[1]);
      }
    }
    double worst = 0;
    for (const auto& [a, b] : pairs) {
      std::complex<double> phase =
          tau_symplectic(a, b).value() *
          static_cast<double>(composition_sign(a, b));
      worst = std::max(worst, (displacement(a) * displacement(b) -
                               phase * displacement(a + b))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    r.pass = worst <= 1e-10;
    r.detail = std::to_string(pairs.size()) + " pairs, worst residual " +
               detail::fmt(worst);
  });

  detail::run_check(report, "displacement_inverse", [&](CheckResult& r) {
    double worst = 0;
    for (const auto& s : detail::all_points(n)) {
      double eta = inversion_sign(s);
      worst = std::max(worst, (displacement(s).adjoint() -
                               eta * displacement(-s))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    r.pass = worst <= 1e-12;
    r.detail = "all points, worst residual " + detail::fmt(worst);
  });

  detail::run_check(report, "displacement_orthogonality", [&](CheckResult& r) {
    auto pts = medium ? detail::all_points(n) : detail::sample_points(n, 48, rng);
    double worst = 0;
    std::vector<ComplexMatrix> ds;
    ds.reserve(pts.size());
    for (const auto& s : pts) ds.push_back(displacement(s));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < pts.size(); ++j) {
        std::complex<double> t = trace_inner(ds[i], ds[j]);
        double expect = (pts[i] == pts[j]) ? n : 0.0;
        worst = std::max(worst, std::abs(t - expect));
      }
    }
    r.pass = worst <= 1e-10;
    r.detail = std::to_string(pts.size() * pts.size()) +
               " pairs, worst residual " + detail::fmt(worst);
  });

  detail::run_check(report, "line_census", [&](CheckResult& r) {
    // enumerate_lines already failed loudly if any candidate broke closure,
    // isotropy, or maximality; here the counts are cross-checked.
    if (static_cast<int>(lines.size()) != divisor_sigma(n)) {
      r.pass = false;
      r.detail = "count mismatch";
      return;
    }
    auto f = prime_factorize(n);
    for (const auto& s : detail::all_points(n)) {
      long long expect = 1;
      for (auto [p, e] : f.factors) {
        int pe = 1;
        for (int i = 0; i < e; ++i) pe *= p;
        // valuation of the CRT component of s in the p^e factor
        Residue rq(s.q, pe), rp(s.p, pe);
        int v = std::min(p_valuation(rq, p, e), p_valuation(rp, p, e));
        long long cnt = 0, pk = 1;
        for (int k = 0; k <= v; ++k) {
          cnt += pk;
          pk *= p;
        }
        expect *= cnt;
      }
      if (static_cast<long long>(lines_through(s, lines).size()) != expect) {
        r.pass = false;
        r.detail = "through-count mismatch at (" + std::to_string(s.q) + "," +
                   std::to_string(s.p) + ")";
        return;
      }
    }
    r.pass = true;
    r.detail = std::to_string(lines.size()) +
               " lines, through-counts match the valuation formula";
  });

  detail::run_check(report, "sl2_orbits", [&](CheckResult& r) {
    auto orbit_lines = lines;  // sl2_orbits mutates orbit ids
    auto dec = sl2_orbits(orbit_lines);
    std::size_t covered = 0;
    for (const auto& o : dec.orbits) {
      covered += o.size();
      bool c0 = orbit_lines[o.front()].cyclic();
      for (int idx : o) {
        if (orbit_lines[idx].cyclic() != c0) {
          r.pass = false;
          r.detail = "orbit mixes cyclic and non-cyclic lines";
          return;
        }
      }
    }
    r.pass = covered == orbit_lines.size();
    r.detail = std::to_string(dec.orbits.size()) + " orbits, |SL(2,Z_N)| = " +
               std::to_string(dec.group_order);
  });

  // Sign system over the cyclic lines (for odd N that is every line).
  SignSystem cyclic_sys;
  {
    std::vector<IsotropicLine> cyclic;
    for (const auto& l : lines) {
      if (l.cyclic() || n % 2 == 1) cyclic.push_back(l);
    }
    cyclic_sys = build_system(n, cyclic);
  }
  SolveOutcome outcome = solve(cyclic_sys);

  detail::run_check(report, "sign_solver", [&](CheckResult& r) {
    if (n % 2 == 1) {
      r.pass = outcome.kind == SolveOutcome::Kind::Unique &&
               outcome.particular == odd_closed_form(n);
      r.detail = "unique solution matches (-1)^{qp}";
      return;
    }
    if (outcome.kind != SolveOutcome::Kind::Family) {
      r.pass = false;
      r.detail = "expected an affine family";
      return;
    }
    if (is_power_of_two(n)) {
      bool dims = outcome.nullspace_dimension() == free_sign_count(n) &&
                  outcome.free_points == canonical_free_candidates(n);
      bool prop = propagation_check(outcome.particular);
      std::uniform_int_distribution<std::uint64_t> mask(
          0, (1ULL << outcome.nullspace_dimension()) - 1);
      for (int i = 0; i < 8 && prop; ++i) {
        prop = propagation_check(family_member(outcome, mask(rng)));
      }
      r.pass = dims && prop;
      r.detail = "dimension " +
                 std::to_string(outcome.nullspace_dimension()) +
                 ", canonical free points, propagation holds";
    } else {
      r.pass = outcome.nullspace_dimension() > 0;
      r.detail = "family of dimension " +
                 std::to_string(outcome.nullspace_dimension());
    }
  });

  detail::run_check(report, "two_generator_inconsistency", [&](CheckResult& r) {
    std::vector<IsotropicLine> noncyclic;
    for (const auto& l : lines) {
      if (!l.cyclic()) noncyclic.push_back(l);
    }
    if (n % 2 == 1) {
      // Odd N: every line is satisfiable by the unique solution, including
      // the non-cyclic ones.
      SolveOutcome full = solve(build_system(n, lines));
      r.pass = full.kind == SolveOutcome::Kind::Unique;
      r.detail = "all " + std::to_string(lines.size()) +
                 " lines consistent (odd N)";
      return;
    }
    if (noncyclic.empty()) {
      r.pass = true;
      r.detail = "no two-generator lines at this N";
      return;
    }
    SolveOutcome full = solve(build_system(n, lines));
    r.pass = full.kind == SolveOutcome::Kind::Inconsistent &&
             full.witness.has_value();
    if (r.pass) {
      const auto& w = *full.witness;
      r.detail = "contradiction at (" + std::to_string(w.point.q) + "," +
                 std::to_string(w.point.p) + "), certificate of " +
                 std::to_string(w.certificate.size()) + " equations";
    } else {
      r.detail = "expected inconsistency did not materialize";
    }
  });

  const SignAssignment signs = outcome.kind == SolveOutcome::Kind::Unique
                                   ? outcome.particular
                                   : family_member(outcome, 0);

  detail::run_check(report, "phase_point_operators", [&](CheckResult& r) {
    auto pts = small ? detail::all_points(n) : detail::sample_points(n, 16, rng);
    double worst_trace = 0;
    for (const auto& s : pts) {
      ComplexMatrix w = phase_point_operator(s, signs);  // throws if not Hermitian
      worst_trace = std::max(
          worst_trace, std::abs(w.trace() - std::complex<double>(1.0, 0.0)));
    }
    r.pass = worst_trace <= 1e-10;
    r.detail = std::to_string(pts.size()) + " points, worst trace defect " +
               detail::fmt(worst_trace);
  });

  detail::run_check(report, "phase_point_orthogonality", [&](CheckResult& r) {
    auto pts = medium ? detail::all_points(n) : detail::sample_points(n, 24, rng);
    std::vector<ComplexMatrix> ws;
    ws.reserve(pts.size());
    for (const auto& s : pts) ws.push_back(phase_point_operator(s, signs));
    double worst = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < pts.size(); ++j) {
        double expect = (pts[i] == pts[j]) ? n : 0.0;
        worst = std::max(worst, std::abs(trace_inner(ws[i], ws[j]) - expect));
      }
    }
    r.pass = worst <= 1e-9;
    r.detail = std::to_string(pts.size() * pts.size()) +
               " pairs, worst residual " + detail::fmt(worst);
  });

  detail::run_check(report, "covariance", [&](CheckResult& r) {
    double worst = 0;
    const int trials = 50;
    for (int i = 0; i < trials; ++i) {
      auto s = detail::sample_points(n, 2, rng);
      ComplexMatrix d = displacement(s[0]);
      ComplexMatrix lhs =
          d * phase_point_operator(s[1], signs) * d.adjoint();
      worst = std::max(worst, (lhs - phase_point_operator(s[0] + s[1], signs))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    r.pass = worst <= 1e-10;
    r.detail = std::to_string(trials) + " samples, worst residual " +
               detail::fmt(worst);
  });

  detail::run_check(report, "inversion_formula", [&](CheckResult& r) {
    if (!medium) {
      r.pass = true;
      r.detail = "skipped for N > 16";
      return;
    }
    std::vector<ComplexMatrix> ws;
    ws.reserve(n * n);
    for (const auto& s : detail::all_points(n)) {
      ws.push_back(phase_point_operator(s, signs));
    }
    auto targets = small ? detail::all_points(n) : detail::sample_points(n, 8, rng);
    double worst = 0;
    for (const auto& s : targets) {
      ComplexMatrix acc = ComplexMatrix::Zero(n, n);
      for (const auto& sp : detail::all_points(n)) {
        acc += TauPhase(2 * symplectic_integer(s, sp), n).value() *
               ws[point_index(sp)];
      }
      acc /= double(n);
      double sgn = signs.sign(s);
      worst = std::max(worst,
                       (acc - sgn * displacement(s)).cwiseAbs().maxCoeff());
    }
    r.pass = worst <= 1e-10;
    r.detail = std::to_string(targets.size()) + " points, worst residual " +
               detail::fmt(worst);
  });

  detail::run_check(report, "bundle_marginals", [&](CheckResult& r) {
    std::vector<const IsotropicLine*> usable;
    for (const auto& l : lines) {
      bool has_dir = false;
      for (const auto& s : l.points) {
        if (s.q == 1 || s.p == 1) {
          has_dir = true;
          break;
        }
      }
      if (has_dir) usable.push_back(&l);
    }
    if (!medium && usable.size() > 6) usable.resize(6);
    const int states = medium ? 5 : 2;
    int evaluated = 0;
    for (int i = 0; i < states; ++i) {
      ComplexMatrix rho = random_density_matrix(n, rng);
      for (const auto* l : usable) {
        bundle_marginal(rho, bundle(*l), signs);  // throws on any violation
        ++evaluated;
      }
    }
    r.pass = true;
    r.detail = std::to_string(evaluated) +
               " bundle marginals nonnegative and normalized";
  });

  detail::run_check(report, "wigner_translate_sums", [&](CheckResult& r) {
    if (!medium) {
      r.pass = true;
      r.detail = "skipped for N > 16";
      return;
    }
    double worst = 0;
    for (int i = 0; i < 2; ++i) {
      ComplexMatrix rho = random_density_matrix(n, rng);
      WignerGrid grid = wigner_function(rho, signs);
      worst = std::max(worst, std::abs(grid.sum() - 1.0));
      worst = std::max(worst, position_marginal_error(grid, rho));
      worst = std::max(worst, momentum_marginal_error(grid, rho));
      int checked = 0;
      for (const auto& l : lines) {
        if (checked >= 3) break;
        LineBundle b;
        try {
          b = bundle(l);
        } catch (const std::invalid_argument&) {
          continue;
        }
        ++checked;
        auto probs = bundle_marginal(rho, b, signs);
        for (int shift = 0; shift < n; ++shift) {
          double via_grid = 0;
          for (const auto& s : b.translates[shift]) {
            via_grid += grid.values(s.q, s.p);
          }
          worst = std::max(worst, std::abs(via_grid - probs[shift]));
        }
      }
    }
    r.pass = worst <= 1e-9;
    r.detail = "grid sums, standard marginals, translate sums; worst " +
               detail::fmt(worst);
  });

  detail::run_check(report, "tomography", [&](CheckResult& r) {
    if (!medium) {
      r.pass = true;
      r.detail = "skipped for N > 16";
      return;
    }
    TomoFrame frame = build_frame(lines, signs);
    int rank = frame_rank(frame);
    if (rank != n * n - 1) {
      r.pass = false;
      r.detail = "frame rank " + std::to_string(rank) + ", expected " +
                 std::to_string(n * n - 1);
      return;
    }
    double worst = 0;
    for (int i = 0; i < 2; ++i) {
      ComplexMatrix rho = random_density_matrix(n, rng);
      ComplexMatrix rebuilt = reconstruct(frame, exact_probabilities(rho, frame));
      worst = std::max(worst, (rebuilt - rho).cwiseAbs().maxCoeff());
    }
    r.pass = worst <= 1e-8;
    r.detail = "rank " + std::to_string(rank) + ", worst round-trip error " +
               detail::fmt(worst);
  });

  return report;
}

}  // namespace finwig
