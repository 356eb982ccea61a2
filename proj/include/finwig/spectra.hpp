#pragma once

// Census of phase-point-operator spectra across a sign family.
//
// All members of a family share traces Tr(What) = 1 and Tr(What^2) = N, but
// the full spectrum of What(0,0) splits the family into classes. The census
// walks every member (Gray-code order, one sign flip per step), assembles
// What(0,0) directly from the displacement phase table, and buckets the
// eigenvalue vectors after quantizing by the comparison tolerance.

#include "finwig/matrix.hpp"
#include "finwig/phase.hpp"
#include "finwig/ring.hpp"
#include "finwig/signs.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace finwig {

struct CensusEntry {
  Spectrum spectrum;
  std::uint64_t count = 0;
  std::uint64_t representative = 0;  // smallest member mask in the class
};

// Renders a family mask as one character per free point, '0' for +1 and '1'
// for -1, in free_points order. The same encoding the CLI accepts back.
inline std::string mask_to_bits(const SolveOutcome& outcome,
                                std::uint64_t mask) {
  std::string s(outcome.nullspace_dimension(), '0');
  for (int j = 0; j < outcome.nullspace_dimension(); ++j) {
    if ((mask >> j) & 1) s[j] = '1';
  }
  return s;
}

inline std::uint64_t bits_to_mask(const SolveOutcome& outcome,
                                  const std::string& bits) {
  if (static_cast<int>(bits.size()) != outcome.nullspace_dimension()) {
    throw std::invalid_argument(
        "sign choice must have one bit per free point (" +
        std::to_string(outcome.nullspace_dimension()) + " expected)");
  }
  std::uint64_t mask = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1' || bits[j] == '-') {
      mask |= 1ULL << j;
    } else if (bits[j] != '0' && bits[j] != '+') {
      throw std::invalid_argument("sign choice characters must be 0/1 or +/-");
    }
  }
  return mask;
}

namespace detail {

// What(0,0)[r][c] = (1/N) sum_p S(r-c, p) tau^{(r-c)p + 2pc}; the table below
// holds the tau powers indexed [q][c][p] so the member loop is just signed
// accumulation.
struct OriginOperatorTable {
  int n;
  std::vector<std::complex<double>> tau;  // [(q * n + c) * n + p]

  explicit OriginOperatorTable(int n_) : n(n_), tau(n_ * n_ * n_) {
    for (int q = 0; q < n; ++q) {
      for (int c = 0; c < n; ++c) {
        for (int p = 0; p < n; ++p) {
          tau[(q * n + c) * n + p] =
              TauPhase(displacement_entry_exponent(PhasePoint(q, p, n), c), n)
                  .value();
        }
      }
    }
  }

  void fill(const std::vector<double>& sign_of, ComplexMatrix& w) const {
    for (int c = 0; c < n; ++c) {
      for (int q = 0; q < n; ++q) {
        const std::complex<double>* row = &tau[(q * n + c) * n];
        const double* s = &sign_of[q * n];
        std::complex<double> acc = 0;
        for (int p = 0; p < n; ++p) acc += s[p] * row[p];
        w((q + c) % n, c) = acc / double(n);
      }
    }
  }
};

struct CensusAccumulator {
  std::map<std::vector<long long>, CensusEntry> classes;

  void add(const Spectrum& spec, std::uint64_t mask, double tol) {
    std::vector<long long> key(spec.values.size());
    for (std::size_t i = 0; i < key.size(); ++i) {
      key[i] = std::llround(spec.values[i] / tol);
    }
    auto [it, fresh] = classes.try_emplace(key);
    if (fresh) {
      it->second.spectrum = spec;
      it->second.representative = mask;
    } else {
      if (mask < it->second.representative) it->second.representative = mask;
    }
    ++it->second.count;
  }

  void merge(const CensusAccumulator& other) {
    for (const auto& [key, entry] : other.classes) {
      auto [it, fresh] = classes.try_emplace(key, entry);
      if (!fresh) {
        it->second.count += entry.count;
        if (entry.representative < it->second.representative) {
          it->second.representative = entry.representative;
        }
      }
    }
  }
};

inline void census_worker(const SolveOutcome& family,
                          const OriginOperatorTable& table,
                          std::uint64_t begin, std::uint64_t end, double tol,
                          CensusAccumulator& acc) {
  const int n = family.n;
  std::vector<std::vector<int>> basis_support(family.nullspace_dimension());
  for (int j = 0; j < family.nullspace_dimension(); ++j) {
    for (int v = 0; v < n * n; ++v) {
      if (family.nullspace_basis[j].bits[v]) basis_support[j].push_back(v);
    }
  }

  auto gray = [](std::uint64_t i) { return i ^ (i >> 1); };
  std::vector<double> sign_of(n * n);
  {
    SignAssignment first = family_member(family, gray(begin));
    for (int v = 0; v < n * n; ++v) sign_of[v] = first.bits[v] ? -1.0 : 1.0;
  }

  ComplexMatrix w(n, n);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
  for (std::uint64_t i = begin; i < end; ++i) {
    const std::uint64_t mask = gray(i);
    table.fill(sign_of, w);
    solver.compute(w, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("census eigensolve failed at mask " +
                               std::to_string(mask));
    }
    Spectrum spec;
    spec.tolerance = tol;
    spec.values.assign(solver.eigenvalues().data(),
                       solver.eigenvalues().data() + n);
    std::reverse(spec.values.begin(), spec.values.end());
    acc.add(spec, mask, tol);

    if (i + 1 < end) {
      // Gray step: exactly one free sign flips between i and i+1.
      const int j = std::countr_zero(i + 1);
      for (int v : basis_support[j]) sign_of[v] = -sign_of[v];
    }
  }
}

}  // namespace detail

// Walks the whole family and returns the distinct spectra of What(0,0),
// each with its multiplicity and smallest representative mask. Entries are
// sorted by spectrum, descending lexicographically. thread_count 0 means
// one worker per hardware thread.
inline std::vector<CensusEntry> census(const SolveOutcome& family,
                                       double tol = 1e-9,
                                       int thread_count = 0) {
  if (family.kind == SolveOutcome::Kind::Inconsistent) {
    throw std::invalid_argument("inconsistent family has no census");
  }
  const int dim = family.nullspace_dimension();
  if (dim > 26) {
    throw std::invalid_argument("family dimension " + std::to_string(dim) +
                                " is beyond the census budget");
  }
  const std::uint64_t total = 1ULL << dim;
  detail::OriginOperatorTable table(family.n);

  if (thread_count <= 0) {
    thread_count = static_cast<int>(std::thread::hardware_concurrency());
    if (thread_count <= 0) thread_count = 1;
  }
  const std::uint64_t chunk = 1 + (total - 1) / thread_count;

  std::vector<detail::CensusAccumulator> partial(thread_count);
  std::vector<std::thread> workers;
  for (int t = 0; t < thread_count; ++t) {
    const std::uint64_t begin = std::min<std::uint64_t>(t * chunk, total);
    const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, total);
    if (begin >= end) continue;
    workers.emplace_back(detail::census_worker, std::cref(family),
                         std::cref(table), begin, end, tol,
                         std::ref(partial[t]));
  }
  for (auto& th : workers) th.join();

  detail::CensusAccumulator merged;
  for (const auto& acc : partial) merged.merge(acc);

  // Quantization insurance: coalesce classes whose spectra agree within the
  // tolerance but straddled a rounding boundary.
  std::vector<CensusEntry> entries;
  for (auto& [key, entry] : merged.classes) entries.push_back(entry);
  std::vector<CensusEntry> out;
  for (auto& e : entries) {
    bool absorbed = false;
    for (auto& kept : out) {
      if (kept.spectrum.approx_equal(e.spectrum)) {
        kept.count += e.count;
        if (e.representative < kept.representative) {
          kept.representative = e.representative;
        }
        absorbed = true;
        break;
      }
    }
    if (!absorbed) out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const CensusEntry& l,
                                       const CensusEntry& r) {
    return l.spectrum.values > r.spectrum.values;
  });
  std::uint64_t counted = 0;
  for (const auto& e : out) counted += e.count;
  if (counted != total) {
    throw std::logic_error("census lost members: " + std::to_string(counted) +
                           " of " + std::to_string(total));
  }
  return out;
}

}  // namespace finwig
