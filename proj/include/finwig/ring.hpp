#pragma once

// Modular arithmetic over Z_N and phase-space points on the N x N grid.
//
// Everything downstream (cocycles, isotropic lines, sign systems) reduces to
// exact integer arithmetic in Z_N or Z_2N, so this header keeps values as
// canonical ints in [0, N) and never touches floating point.

#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace finwig {

// Hard ceiling on the grid dimension, overridable through FW_MAX_N. Brute
// force passes (line verification, sign elimination) are sized for N <= 64;
// raising the cap is allowed but you get what you pay for.
inline constexpr int kDefaultMaxDimension = 64;

inline int max_dimension() {
  if (const char* env = std::getenv("FW_MAX_N")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 2) return static_cast<int>(v);
  }
  return kDefaultMaxDimension;
}

inline void check_dimension(int n) {
  if (n < 2 || n > max_dimension()) {
    throw std::out_of_range("dimension N=" + std::to_string(n) +
                            " outside [2, " + std::to_string(max_dimension()) +
                            "]");
  }
}

// Canonical representative of a mod m in [0, m). Works for negative a.
inline int floor_mod(long long a, int m) {
  long long r = a % m;
  if (r < 0) r += m;
  return static_cast<int>(r);
}

// An element of Z_m. The modulus travels with the value so that mixed-modulus
// arithmetic fails loudly instead of silently wrapping at the wrong place.
struct Residue {
  int value = 0;
  int modulus = 1;

  Residue() = default;
  Residue(long long v, int m) {
    if (m < 1) throw std::invalid_argument("modulus must be positive");
    modulus = m;
    value = floor_mod(v, m);
  }

  friend bool operator==(const Residue&, const Residue&) = default;
};

inline void require_same_modulus(const Residue& a, const Residue& b) {
  if (a.modulus != b.modulus) {
    throw std::invalid_argument("modulus mismatch: " +
                                std::to_string(a.modulus) + " vs " +
                                std::to_string(b.modulus));
  }
}

inline Residue operator+(const Residue& a, const Residue& b) {
  require_same_modulus(a, b);
  return Residue(static_cast<long long>(a.value) + b.value, a.modulus);
}

inline Residue operator-(const Residue& a, const Residue& b) {
  require_same_modulus(a, b);
  return Residue(static_cast<long long>(a.value) - b.value, a.modulus);
}

inline Residue operator*(const Residue& a, const Residue& b) {
  require_same_modulus(a, b);
  return Residue(static_cast<long long>(a.value) * b.value, a.modulus);
}

inline Residue operator-(const Residue& a) {
  return Residue(-static_cast<long long>(a.value), a.modulus);
}

// Inverse of a mod m via the extended Euclidean algorithm.
inline int mod_inverse(int a, int m) {
  int old_r = floor_mod(a, m), r = m;
  int old_s = 1, s = 0;
  while (r != 0) {
    int q = old_r / r;
    int tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) {
    throw std::domain_error(std::to_string(a) + " is not invertible mod " +
                            std::to_string(m));
  }
  return floor_mod(old_s, m);
}

// A point sigma = (q, p) of the phase-space grid Z_N x Z_N. Both coordinates
// share the modulus n and are kept canonical.
struct PhasePoint {
  int q = 0;
  int p = 0;
  int n = 1;

  PhasePoint() = default;
  PhasePoint(long long q_, long long p_, int n_) {
    if (n_ < 1) throw std::invalid_argument("modulus must be positive");
    n = n_;
    q = floor_mod(q_, n_);
    p = floor_mod(p_, n_);
  }

  bool is_origin() const { return q == 0 && p == 0; }

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
  // Row-major grid order, the canonical order used everywhere for
  // determinism (point lists, free-sign lists, equation emission).
  friend auto operator<=>(const PhasePoint& a, const PhasePoint& b) {
    return std::pair(a.q, a.p) <=> std::pair(b.q, b.p);
  }
};

inline void require_same_grid(const PhasePoint& a, const PhasePoint& b) {
  if (a.n != b.n) {
    throw std::invalid_argument("phase points live on different grids: N=" +
                                std::to_string(a.n) + " vs N=" +
                                std::to_string(b.n));
  }
}

inline PhasePoint operator+(const PhasePoint& a, const PhasePoint& b) {
  require_same_grid(a, b);
  return PhasePoint(a.q + b.q, a.p + b.p, a.n);
}

inline PhasePoint operator-(const PhasePoint& a) {
  return PhasePoint(-a.q, -a.p, a.n);
}

inline PhasePoint operator*(int k, const PhasePoint& a) {
  return PhasePoint(static_cast<long long>(k) * a.q,
                    static_cast<long long>(k) * a.p, a.n);
}

// Row-major index q*N + p, the variable numbering shared by the sign solver
// and the Wigner grid.
inline int point_index(const PhasePoint& a) { return a.q * a.n + a.p; }

inline PhasePoint point_from_index(int idx, int n) {
  return PhasePoint(idx / n, idx % n, n);
}

// Symplectic product <a, b> = a.p * b.q - a.q * b.p reduced into Z_N.
// Antisymmetric; a point pairs to zero with itself and with its multiples.
inline Residue symplectic_product(const PhasePoint& a, const PhasePoint& b) {
  require_same_grid(a, b);
  return Residue(
      static_cast<long long>(a.p) * b.q - static_cast<long long>(a.q) * b.p,
      a.n);
}

// Same bilinear form before reduction. Callers that exponentiate the 2N-th
// root of unity need the integer value, since mod-N reduction would lose the
// sign of the resulting phase.
inline long long symplectic_integer(const PhasePoint& a, const PhasePoint& b) {
  require_same_grid(a, b);
  return static_cast<long long>(a.p) * b.q - static_cast<long long>(a.q) * b.p;
}

struct PrimeFactorization {
  int n = 1;
  // (prime, exponent) pairs with ascending primes; empty for n = 1.
  std::vector<std::pair<int, int>> factors;
};

inline PrimeFactorization prime_factorize(int n) {
  if (n < 1) throw std::invalid_argument("prime_factorize requires n >= 1");
  PrimeFactorization f;
  f.n = n;
  int rest = n;
  for (int p = 2; static_cast<long long>(p) * p <= rest; ++p) {
    if (rest % p != 0) continue;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    f.factors.emplace_back(p, e);
  }
  if (rest > 1) f.factors.emplace_back(rest, 1);
  return f;
}

inline bool is_prime_power(const PrimeFactorization& f) {
  return f.factors.size() == 1;
}

inline bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Largest k with p^k dividing a, where a is read as an element of Z_{p^n}.
// The zero residue is divisible by everything in sight, so v(0) = n.
inline int p_valuation(const Residue& a, int p, int n) {
  long long pn = 1;
  for (int i = 0; i < n; ++i) pn *= p;
  if (a.modulus != pn) {
    throw std::invalid_argument("residue modulus is not p^n");
  }
  if (a.value == 0) return n;
  int v = 0;
  int x = a.value;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

// Valuation of a point in a prime-power grid: the min over both coordinates.
// This grades the grid into shells; the number of lines through a point
// depends only on this value.
inline int point_valuation(const PhasePoint& a, int prime) {
  int n = 0;
  long long pn = 1;
  while (pn < a.n) {
    pn *= prime;
    ++n;
  }
  if (pn != a.n) {
    throw std::invalid_argument("grid dimension is not a power of " +
                                std::to_string(prime));
  }
  return std::min(p_valuation(Residue(a.q, a.n), prime, n),
                  p_valuation(Residue(a.p, a.n), prime, n));
}

// Chinese remainder split of a residue along a factorization of its modulus.
inline std::vector<Residue> crt_split(const Residue& a,
                                      const PrimeFactorization& f) {
  if (a.modulus != f.n) {
    throw std::invalid_argument("factorization does not match modulus");
  }
  std::vector<Residue> parts;
  parts.reserve(f.factors.size());
  for (auto [p, e] : f.factors) {
    int pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    parts.emplace_back(a.value, pe);
  }
  return parts;
}

// Inverse of crt_split: recombine via q = sum_j q_j * nu_j * mu_j (mod N)
// with nu_j = N / N_j and mu_j the inverse of nu_j mod N_j.
inline Residue crt_join(const std::vector<Residue>& parts,
                        const PrimeFactorization& f) {
  if (parts.size() != f.factors.size()) {
    throw std::invalid_argument("part count does not match factorization");
  }
  long long acc = 0;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    auto [p, e] = f.factors[j];
    int pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    if (parts[j].modulus != pe) {
      throw std::invalid_argument("part modulus mismatch at factor " +
                                  std::to_string(j));
    }
    int nu = f.n / pe;
    int mu = mod_inverse(nu, pe);
    acc += static_cast<long long>(parts[j].value) * nu % f.n * mu % f.n;
  }
  return Residue(acc, f.n);
}

// Sum of divisors of n. This is how many order-N subgroups (equivalently,
// isotropic lines) the grid carries, so it doubles as the enumeration
// cross-check.
inline int divisor_sigma(int n) {
  auto f = prime_factorize(n);
  long long total = 1;
  for (auto [p, e] : f.factors) {
    long long pe1 = 1;
    for (int i = 0; i <= e; ++i) pe1 *= p;
    total *= (pe1 - 1) / (p - 1);
  }
  return static_cast<int>(total);
}

}  // namespace finwig
