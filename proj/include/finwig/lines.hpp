#pragma once

// Isotropic lines of the grid Z_N x Z_N: the order-N subgroups on which the
// symplectic product vanishes identically. These are the joint-eigenbasis
// labels of the displacement algebra and the index set of every sign system
// and tomographic frame downstream.

#include "finwig/ring.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace finwig {

// Line taxonomy for N = 2^n. Type a1 lines are generated by (1, p0), type a2
// by (q0, 1) with q0 even; both are cyclic and cover the grid by translates.
// Type b lines need two generators and contain only even points.
enum class LineType { A1, A2, B };

inline const char* to_string(LineType t) {
  switch (t) {
    case LineType::A1: return "a1";
    case LineType::A2: return "a2";
    case LineType::B: return "b";
  }
  throw std::logic_error("unreachable");
}

struct IsotropicLine {
  int n = 1;
  std::vector<PhasePoint> points;      // sorted row-major, origin first
  std::vector<PhasePoint> generators;  // one if cyclic, else two
  int orbit = -1;                      // filled in by sl2_orbits

  bool cyclic() const { return generators.size() == 1; }

  bool contains(const PhasePoint& s) const {
    return std::binary_search(points.begin(), points.end(), s);
  }
};

namespace detail {

// Every candidate subgroup is re-verified from scratch; the generator makes
// no promises the checker does not enforce. Throws on any violation, since a
// failure means the enumeration itself is wrong.
inline void verify_line(const IsotropicLine& line) {
  const int n = line.n;
  if (static_cast<int>(line.points.size()) != n) {
    throw std::logic_error("line has wrong cardinality");
  }
  std::vector<char> member(n * n, 0);
  for (const auto& s : line.points) member[point_index(s)] = 1;
  if (!member[0]) throw std::logic_error("line misses the origin");
  for (const auto& a : line.points) {
    if (!member[point_index(-a)]) {
      throw std::logic_error("line not closed under negation");
    }
    for (const auto& b : line.points) {
      if (!member[point_index(a + b)]) {
        throw std::logic_error("line not closed under addition");
      }
      if (symplectic_product(a, b).value != 0) {
        throw std::logic_error("line is not isotropic");
      }
    }
  }
  // Maximality: no point outside pairs to zero with the whole line. Order-N
  // subgroups are automatically maximal isotropic, but we check rather than
  // rely on that theorem.
  for (int idx = 0; idx < n * n; ++idx) {
    if (member[idx]) continue;
    PhasePoint out = point_from_index(idx, n);
    bool orthogonal_to_all = true;
    for (const auto& a : line.points) {
      if (symplectic_product(out, a).value != 0) {
        orthogonal_to_all = false;
        break;
      }
    }
    if (orthogonal_to_all) {
      throw std::logic_error("line is not maximal isotropic");
    }
  }
}

inline std::vector<int> line_key(const IsotropicLine& line) {
  std::vector<int> key;
  key.reserve(line.points.size());
  for (const auto& s : line.points) key.push_back(point_index(s));
  return key;
}

// Pick canonical generators for a sorted point set. Cyclic lines holding a
// point with first coordinate 1 (or second coordinate 1) advertise it, since
// those generators determine the bundle direction; other cyclic lines take
// the smallest point of full order. Non-cyclic lines keep a two-generator
// description in Hermite form.
inline void assign_generators(IsotropicLine& line, int hnf_a, int hnf_c,
                              int hnf_d) {
  const int n = line.n;
  for (const auto& s : line.points) {
    if (s.q == 1) {
      line.generators = {s};
      return;
    }
  }
  for (const auto& s : line.points) {
    if (s.p == 1) {
      line.generators = {s};
      return;
    }
  }
  for (const auto& s : line.points) {
    if (!s.is_origin() && std::gcd(std::gcd(s.q, s.p), n) == 1) {
      line.generators = {s};
      return;
    }
  }
  line.generators = {PhasePoint(hnf_a, 0, n), PhasePoint(hnf_c, hnf_d, n)};
}

}  // namespace detail

// All isotropic lines of Z_N x Z_N, sorted by their point lists. The
// candidates come from the Hermite normal form of index-N sublattices:
// generators (a, 0) and (c, d) with a*d = N and 0 <= c < a produce each
// order-N subgroup exactly once. Each candidate is verified and the total is
// checked against the divisor-sum count.
inline std::vector<IsotropicLine> enumerate_lines(int n) {
  check_dimension(n);
  std::vector<IsotropicLine> lines;
  for (int d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    const int a = n / d;
    for (int c = 0; c < a; ++c) {
      IsotropicLine line;
      line.n = n;
      std::vector<char> seen(n * n, 0);
      for (int y = 0; y < a; ++y) {
        for (int x = 0; x < d; ++x) {
          PhasePoint s(static_cast<long long>(x) * a +
                           static_cast<long long>(y) * c,
                       static_cast<long long>(y) * d, n);
          if (!seen[point_index(s)]) {
            seen[point_index(s)] = 1;
            line.points.push_back(s);
          }
        }
      }
      std::sort(line.points.begin(), line.points.end());
      detail::verify_line(line);
      detail::assign_generators(line, a, c, d);
      lines.push_back(std::move(line));
    }
  }
  std::sort(lines.begin(), lines.end(),
            [](const IsotropicLine& l, const IsotropicLine& r) {
              return detail::line_key(l) < detail::line_key(r);
            });
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::line_key(lines[i - 1]) == detail::line_key(lines[i])) {
      throw std::logic_error("duplicate line escaped the Hermite form");
    }
  }
  if (static_cast<int>(lines.size()) != divisor_sigma(n)) {
    throw std::logic_error("line count disagrees with the divisor sum");
  }
  return lines;
}

// Indices of the lines containing sigma. For prime-power N the count depends
// only on the valuation of sigma: (p^{v+1} - 1) / (p - 1).
inline std::vector<int> lines_through(const PhasePoint& sigma,
                                      const std::vector<IsotropicLine>& lines) {
  std::vector<int> hits;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].n != sigma.n) {
      throw std::invalid_argument("point and lines live on different grids");
    }
    if (lines[i].contains(sigma)) hits.push_back(static_cast<int>(i));
  }
  return hits;
}

// Type of a line when N is a power of two. Other N have no a1/a2/b split.
inline LineType classify_line(const IsotropicLine& line) {
  if (!is_power_of_two(line.n)) {
    throw std::invalid_argument("line types are defined for N = 2^n only");
  }
  if (!line.cyclic()) return LineType::B;
  const PhasePoint& g = line.generators.front();
  if (g.q == 1) return LineType::A1;
  if (g.p == 1) {
    if (g.q % 2 != 0) {
      throw std::logic_error("a2 generator with odd first coordinate");
    }
    return LineType::A2;
  }
  throw std::logic_error("cyclic line generator misses both axes forms");
}

struct OrbitDecomposition {
  // Line indices per orbit, orbits sorted by size descending then by their
  // smallest line index. Line::orbit is set to match.
  std::vector<std::vector<int>> orbits;
  long long group_order = 0;
};

namespace detail {

inline long long expected_sl2_order(int n) {
  // |SL(2, Z_N)| = N^3 * prod_{p | N} (1 - 1/p^2), multiplicative over the
  // prime factorization.
  long long order = 1;
  for (auto [p, e] : prime_factorize(n).factors) {
    long long pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    order *= pe * pe * pe / (static_cast<long long>(p) * p) *
             (static_cast<long long>(p) * p - 1);
  }
  return order;
}

struct Mat2 {
  // Row-major 2x2 over Z_N.
  int a, b, c, d;
};

inline long long sl2_group_order(int n) {
  auto key = [n](const Mat2& m) {
    return ((static_cast<long long>(m.a) * n + m.b) * n + m.c) * n + m.d;
  };
  auto mul = [n](const Mat2& x, const Mat2& y) {
    return Mat2{floor_mod(static_cast<long long>(x.a) * y.a + x.b * y.c, n),
                floor_mod(static_cast<long long>(x.a) * y.b + x.b * y.d, n),
                floor_mod(static_cast<long long>(x.c) * y.a + x.d * y.c, n),
                floor_mod(static_cast<long long>(x.c) * y.b + x.d * y.d, n)};
  };
  const Mat2 shear{1, 1, 0, 1};
  const Mat2 flip{0, floor_mod(-1, n), 1, 0};
  std::unordered_set<long long> seen;
  std::vector<Mat2> frontier = {Mat2{1, 0, 0, 1}};
  seen.insert(key(frontier.front()));
  while (!frontier.empty()) {
    Mat2 m = frontier.back();
    frontier.pop_back();
    for (const Mat2& g : {shear, flip}) {
      Mat2 next = mul(g, m);
      if (seen.insert(key(next)).second) frontier.push_back(next);
    }
  }
  return static_cast<long long>(seen.size());
}

}  // namespace detail

// Orbit partition of the lines under SL(2, Z_N), which acts on points by
// matrix multiplication and permutes isotropic lines. The group is generated
// by the shear [[1,1],[0,1]] and the quarter turn [[0,-1],[1,0]]; orbits are
// found by closing each line under the two generators. The group order is
// computed by brute-force closure as well and checked against the product
// formula before anything else runs.
inline OrbitDecomposition sl2_orbits(std::vector<IsotropicLine>& lines) {
  if (lines.empty()) throw std::invalid_argument("no lines to partition");
  const int n = lines.front().n;

  OrbitDecomposition out;
  out.group_order = detail::sl2_group_order(n);
  if (out.group_order != detail::expected_sl2_order(n)) {
    throw std::logic_error("SL(2, Z_N) closure disagrees with its order");
  }

  std::map<std::vector<int>, int> index_of;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    index_of[detail::line_key(lines[i])] = static_cast<int>(i);
  }
  auto act = [n](const detail::Mat2& m, const IsotropicLine& line) {
    std::vector<int> key;
    key.reserve(line.points.size());
    for (const auto& s : line.points) {
      PhasePoint image(static_cast<long long>(m.a) * s.q +
                           static_cast<long long>(m.b) * s.p,
                       static_cast<long long>(m.c) * s.q +
                           static_cast<long long>(m.d) * s.p,
                       n);
      key.push_back(point_index(image));
    }
    std::sort(key.begin(), key.end());
    return key;
  };

  const detail::Mat2 shear{1, 1, 0, 1};
  const detail::Mat2 flip{0, floor_mod(-1, n), 1, 0};
  std::vector<int> orbit_of(lines.size(), -1);
  std::vector<std::vector<int>> raw_orbits;
  for (std::size_t start = 0; start < lines.size(); ++start) {
    if (orbit_of[start] != -1) continue;
    const int id = static_cast<int>(raw_orbits.size());
    std::vector<int> frontier = {static_cast<int>(start)};
    orbit_of[start] = id;
    std::vector<int> members = {static_cast<int>(start)};
    while (!frontier.empty()) {
      int cur = frontier.back();
      frontier.pop_back();
      for (const auto& g : {shear, flip}) {
        auto it = index_of.find(act(g, lines[cur]));
        if (it == index_of.end()) {
          throw std::logic_error("SL(2, Z_N) image is not a line");
        }
        if (orbit_of[it->second] == -1) {
          orbit_of[it->second] = id;
          frontier.push_back(it->second);
          members.push_back(it->second);
        }
      }
    }
    std::sort(members.begin(), members.end());
    raw_orbits.push_back(std::move(members));
  }

  std::sort(raw_orbits.begin(), raw_orbits.end(),
            [](const std::vector<int>& l, const std::vector<int>& r) {
              if (l.size() != r.size()) return l.size() > r.size();
              return l.front() < r.front();
            });
  for (std::size_t id = 0; id < raw_orbits.size(); ++id) {
    for (int idx : raw_orbits[id]) lines[idx].orbit = static_cast<int>(id);
  }
  out.orbits = std::move(raw_orbits);
  return out;
}

// A line plus its N parallel translates, which partition the grid. The shift
// direction is forced by the generator: lines through (1, p0) translate in
// the momentum direction (0, 1), lines through (q0, 1) in the position
// direction (1, 0). Lines containing neither kind of point (the two-generator
// ones) have no translate structure of this form.
struct LineBundle {
  int n = 1;
  int base_line = -1;  // index into the caller's line list, if known
  IsotropicLine base;
  PhasePoint direction;
  std::vector<std::vector<PhasePoint>> translates;  // [shift][point], sorted
};

inline LineBundle bundle(const IsotropicLine& line, int line_index = -1) {
  const int n = line.n;
  PhasePoint dir(0, 0, n);
  bool found = false;
  for (const auto& s : line.points) {
    if (s.q == 1) {
      dir = PhasePoint(0, 1, n);
      found = true;
      break;
    }
  }
  if (!found) {
    for (const auto& s : line.points) {
      if (s.p == 1) {
        dir = PhasePoint(1, 0, n);
        found = true;
        break;
      }
    }
  }
  if (!found) {
    throw std::invalid_argument(
        "line has no translate direction: it contains no point (1, p0) or "
        "(q0, 1)");
  }

  LineBundle b;
  b.n = n;
  b.base_line = line_index;
  b.base = line;
  b.direction = dir;
  b.translates.resize(n);
  std::vector<char> covered(n * n, 0);
  for (int shift = 0; shift < n; ++shift) {
    auto& t = b.translates[shift];
    t.reserve(n);
    for (const auto& s : line.points) t.push_back(s + shift * dir);
    std::sort(t.begin(), t.end());
    for (const auto& s : t) {
      if (covered[point_index(s)]++) {
        throw std::logic_error("bundle translates overlap");
      }
    }
  }
  // covered is all-ones by counting: N translates of N distinct points each.
  return b;
}

}  // namespace finwig
