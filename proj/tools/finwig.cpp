// finwig: phase-space toolkit for finite-dimensional Wigner functions.
//
// Subcommands: lines, signs, wigner, tomo, spectra, verify. Output is JSON on
// stdout by default (--pretty switches to human tables). Exit codes: 0 on
// success, including computed findings like an inconsistent sign system;
// 1 for usage and input errors; 2 when a mathematical contract fails during
// computation (verification failures, rank-deficient reconstruction, and the
// like). The grid dimension is capped at 64 unless FW_MAX_N raises it.

#include "CLI11.hpp"
#include "json.hpp"

#include "finwig/lines.hpp"
#include "finwig/matrix.hpp"
#include "finwig/phase.hpp"
#include "finwig/ring.hpp"
#include "finwig/signs.hpp"
#include "finwig/spectra.hpp"
#include "finwig/tomography.hpp"
#include "finwig/verify.hpp"
#include "finwig/wigner.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace finwig;

json point_json(const PhasePoint& s) { return json::array({s.q, s.p}); }

json equation_json(const SignSystem& sys, int index) {
  const SignEquation& eq = sys.equations[index];
  json j;
  j["index"] = index;
  switch (eq.kind) {
    case EquationKind::Unit: j["kind"] = "unit"; break;
    case EquationKind::Symmetry: j["kind"] = "symmetry"; break;
    case EquationKind::Line: j["kind"] = "line"; break;
  }
  if (eq.line >= 0) j["line"] = eq.line;
  j["pair"] = json::array({point_json(eq.a), point_json(eq.b)});
  json vars = json::array();
  for (int v : eq.vars) vars.push_back(point_json(point_from_index(v, sys.n)));
  j["vars"] = vars;
  j["rhs"] = eq.rhs ? -1 : 1;
  return j;
}

// Shared context: which lines enter the sign system, and the solved family.
struct SignContext {
  std::vector<IsotropicLine> all_lines;
  std::vector<IsotropicLine> used_lines;
  SignSystem system;
  SolveOutcome outcome;
};

SignContext solve_signs(int n, bool include_two_generator) {
  SignContext ctx;
  ctx.all_lines = enumerate_lines(n);
  for (const auto& l : ctx.all_lines) {
    // Odd N keeps every line (they are jointly satisfiable); even N defaults
    // to the cyclic ones, where a family exists.
    if (l.cyclic() || n % 2 == 1 || include_two_generator) {
      ctx.used_lines.push_back(l);
    }
  }
  ctx.system = build_system(n, ctx.used_lines);
  SolveOptions opts;
  opts.track_provenance = n <= 32;  // witness chains get heavy beyond this
  ctx.outcome = solve(ctx.system, opts);
  return ctx;
}

SignAssignment pick_member(const SolveOutcome& outcome,
                           const std::string& sign_choice) {
  if (outcome.kind == SolveOutcome::Kind::Unique) {
    if (!sign_choice.empty()) {
      throw std::invalid_argument(
          "--sign-choice is meaningless here: the sign system is unique");
    }
    return outcome.particular;
  }
  if (sign_choice.empty()) return family_member(outcome, 0);
  return family_member(outcome, bits_to_mask(outcome, sign_choice));
}

ComplexMatrix read_state(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open state file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("state file is not valid JSON: " +
                                std::string(e.what()));
  }
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw std::invalid_argument("state file needs an integer field \"n\"");
  }
  if (j["n"].get<int>() != n) {
    throw std::invalid_argument("state dimension " +
                                std::to_string(j["n"].get<int>()) +
                                " does not match --n " + std::to_string(n));
  }
  auto read_part = [&](const char* key, bool required) {
    RealMatrix m = RealMatrix::Zero(n, n);
    if (!j.contains(key)) {
      if (required) {
        throw std::invalid_argument(std::string("state file needs \"") + key +
                                    "\"");
      }
      return m;
    }
    const json& rows = j[key];
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      throw std::invalid_argument(std::string("\"") + key + "\" must be " +
                                  std::to_string(n) + " rows");
    }
    for (int r = 0; r < n; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n) {
        throw std::invalid_argument(std::string("\"") + key + "\" row " +
                                    std::to_string(r) + " must have " +
                                    std::to_string(n) + " entries");
      }
      for (int c = 0; c < n; ++c) m(r, c) = rows[r][c].get<double>();
    }
    return m;
  };
  RealMatrix re = read_part("re", true);
  RealMatrix im = read_part("im", false);
  ComplexMatrix rho(n, n);
  rho.real() = re;
  rho.imag() = im;
  return rho;
}

void emit(const json& j, bool pretty_json = false) {
  std::cout << j.dump(pretty_json ? 2 : -1) << "\n";
}

const char* line_type_name(const IsotropicLine& l) {
  if (is_power_of_two(l.n)) return to_string(classify_line(l));
  return l.cyclic() ? "cyclic" : "two_generator";
}

int cmd_lines(int n, bool pretty, bool show_points) {
  auto lines = enumerate_lines(n);
  auto dec = sl2_orbits(lines);

  json out;
  out["n"] = n;
  out["total"] = lines.size();
  json orbits = json::array();
  for (std::size_t id = 0; id < dec.orbits.size(); ++id) {
    orbits.push_back({{"id", id}, {"size", dec.orbits[id].size()}});
  }
  out["orbits"] = orbits;
  out["group_order"] = dec.group_order;
  json types;
  if (is_power_of_two(n)) {
    int a1 = 0, a2 = 0, b = 0;
    for (const auto& l : lines) {
      switch (classify_line(l)) {
        case LineType::A1: ++a1; break;
        case LineType::A2: ++a2; break;
        case LineType::B: ++b; break;
      }
    }
    types = {{"a1", a1}, {"a2", a2}, {"b", b}};
  } else {
    int cyc = 0, two = 0;
    for (const auto& l : lines) (l.cyclic() ? cyc : two)++;
    types = {{"cyclic", cyc}, {"two_generator", two}};
  }
  out["types"] = types;
  if (show_points) {
    json detail = json::array();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      json lj;
      lj["id"] = i;
      lj["orbit"] = lines[i].orbit;
      lj["type"] = line_type_name(lines[i]);
      json gens = json::array(), pts = json::array();
      for (const auto& g : lines[i].generators) gens.push_back(point_json(g));
      for (const auto& s : lines[i].points) pts.push_back(point_json(s));
      lj["generators"] = gens;
      lj["points"] = pts;
      detail.push_back(lj);
    }
    out["lines"] = detail;
  }

  if (!pretty) {
    emit(out);
    return 0;
  }
  std::cout << "isotropic lines of Z_" << n << " x Z_" << n << "\n";
  std::cout << "  total: " << lines.size() << "\n  orbits:";
  for (const auto& o : dec.orbits) std::cout << " " << o.size();
  std::cout << "  (|SL(2,Z_N)| = " << dec.group_order << ")\n  types: ";
  for (auto it = types.begin(); it != types.end(); ++it) {
    std::cout << it.key() << "=" << it.value().get<int>() << " ";
  }
  std::cout << "\n";
  if (show_points) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::cout << "  line " << std::setw(3) << i << " orbit "
                << lines[i].orbit << " type " << std::setw(13)
                << line_type_name(lines[i]) << "  gen";
      for (const auto& g : lines[i].generators) {
        std::cout << " (" << g.q << "," << g.p << ")";
      }
      std::cout << "  points";
      for (const auto& s : lines[i].points) {
        std::cout << " (" << s.q << "," << s.p << ")";
      }
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_signs(int n, bool pretty, bool include_two_generator) {
  SignContext ctx = solve_signs(n, include_two_generator);
  const SolveOutcome& oc = ctx.outcome;

  json out;
  out["n"] = n;
  out["lines_used"] = ctx.used_lines.size();
  out["include_type_b"] = include_two_generator;
  out["rank"] = oc.rank;
  switch (oc.kind) {
    case SolveOutcome::Kind::Unique: out["outcome"] = "unique"; break;
    case SolveOutcome::Kind::Family: out["outcome"] = "family"; break;
    case SolveOutcome::Kind::Inconsistent:
      out["outcome"] = "inconsistent";
      break;
  }
  if (oc.kind != SolveOutcome::Kind::Inconsistent) {
    out["nullspace_dimension"] = oc.nullspace_dimension();
    json free_pts = json::array();
    for (const auto& s : oc.free_points) free_pts.push_back(point_json(s));
    out["free_points"] = free_pts;
  }
  if (oc.kind == SolveOutcome::Kind::Unique) {
    json grid = json::array();
    for (int q = 0; q < n; ++q) {
      json row = json::array();
      for (int p = 0; p < n; ++p) row.push_back(oc.particular.sign(q, p));
      grid.push_back(row);
    }
    out["signs"] = grid;
  }
  if (oc.kind == SolveOutcome::Kind::Inconsistent) {
    const auto& w = *oc.witness;
    json wj;
    wj["point"] = point_json(w.point);
    wj["triggering_equation"] = equation_json(ctx.system, w.triggering_equation);
    json cert = json::array();
    for (int e : w.certificate) cert.push_back(equation_json(ctx.system, e));
    wj["certificate"] = cert;
    out["witness"] = wj;
  }

  if (!pretty) {
    emit(out);
    return 0;
  }
  std::cout << "sign system on Z_" << n << " x Z_" << n << " ("
            << ctx.used_lines.size() << " lines, rank " << oc.rank << ")\n";
  switch (oc.kind) {
    case SolveOutcome::Kind::Unique: {
      std::cout << "  unique solution:\n";
      for (int q = 0; q < n; ++q) {
        std::cout << "   ";
        for (int p = 0; p < n; ++p) {
          std::cout << (oc.particular.sign(q, p) > 0 ? " +" : " -");
        }
        std::cout << "\n";
      }
      break;
    }
    case SolveOutcome::Kind::Family: {
      std::cout << "  affine family, dimension " << oc.nullspace_dimension()
                << "\n  free points:";
      for (const auto& s : oc.free_points) {
        std::cout << " (" << s.q << "," << s.p << ")";
      }
      std::cout << "\n";
      break;
    }
    case SolveOutcome::Kind::Inconsistent: {
      const auto& w = *oc.witness;
      std::cout << "  inconsistent: conflict surfaces at (" << w.point.q
                << "," << w.point.p << ")\n  certificate ("
                << w.certificate.size() << " equations):\n";
      for (int e : w.certificate) {
        const auto& eq = ctx.system.equations[e];
        const char* kind = eq.kind == EquationKind::Unit        ? "unit"
                           : eq.kind == EquationKind::Symmetry ? "symmetry"
                                                                : "line";
        std::cout << "    #" << e << " " << kind;
        if (eq.line >= 0) std::cout << " " << eq.line;
        std::cout << " pair (" << eq.a.q << "," << eq.a.p << "),(" << eq.b.q
                  << "," << eq.b.p << ") rhs " << (eq.rhs ? -1 : 1) << "\n";
      }
      break;
    }
  }
  return 0;
}

int cmd_wigner(int n, bool pretty, const std::string& state_path,
               const std::string& sign_choice) {
  SignContext ctx = solve_signs(n, false);
  SignAssignment signs = pick_member(ctx.outcome, sign_choice);
  ComplexMatrix rho = read_state(state_path, n);
  validate_density(rho);
  WignerGrid grid = wigner_function(rho, signs);

  json out;
  out["n"] = n;
  out["sign_choice"] = sign_choice.empty() && ctx.outcome.nullspace_dimension()
                           ? mask_to_bits(ctx.outcome, 0)
                           : sign_choice;
  json rows = json::array();
  double min_value = 0;
  for (int q = 0; q < n; ++q) {
    json row = json::array();
    for (int p = 0; p < n; ++p) {
      row.push_back(grid.values(q, p));
      min_value = std::min(min_value, grid.values(q, p));
    }
    rows.push_back(row);
  }
  out["wigner"] = rows;
  out["sum"] = grid.sum();
  out["min_value"] = min_value;
  out["position_marginal_error"] = position_marginal_error(grid, rho);
  out["momentum_marginal_error"] = momentum_marginal_error(grid, rho);

  if (!pretty) {
    emit(out);
    return 0;
  }
  std::cout << "Wigner function (rows q, columns p), sum = " << grid.sum()
            << "\n";
  for (int q = 0; q < n; ++q) {
    std::cout << "  ";
    for (int p = 0; p < n; ++p) {
      std::cout << std::setw(10) << std::setprecision(4) << std::fixed
                << grid.values(q, p);
    }
    std::cout << "\n";
  }
  std::cout << "  marginal errors: position "
            << position_marginal_error(grid, rho) << ", momentum "
            << momentum_marginal_error(grid, rho) << "\n";
  return 0;
}

int cmd_tomo(int n, bool pretty, const std::string& state_path,
             const std::string& sign_choice) {
  SignContext ctx = solve_signs(n, false);
  SignAssignment signs = pick_member(ctx.outcome, sign_choice);
  TomoFrame frame = build_frame(ctx.all_lines, signs);
  int rank = frame_rank(frame);
  const int expected = n * n - 1;

  json out;
  out["n"] = n;
  out["frame_size"] = frame.ops.size();
  out["gram_rank"] = rank;
  out["expected_rank"] = expected;
  out["complete"] = rank == expected;
  out["overcompleteness"] = static_cast<int>(frame.ops.size()) - rank;

  double round_trip = -1;
  if (!state_path.empty()) {
    ComplexMatrix rho = read_state(state_path, n);
    ComplexMatrix rebuilt = reconstruct(frame, exact_probabilities(rho, frame));
    round_trip = (rebuilt - rho).cwiseAbs().maxCoeff();
    out["round_trip_error"] = round_trip;
  }

  if (!pretty) {
    emit(out);
    return 0;
  }
  std::cout << "tomographic frame on Z_" << n << " x Z_" << n << "\n"
            << "  operators: " << frame.ops.size() << " (from "
            << frame.line_ids.size() << " bundles)\n"
            << "  Gram rank: " << rank << " / " << expected
            << (rank == expected ? " (informationally complete)" : " (INCOMPLETE)")
            << "\n";
  if (round_trip >= 0) {
    std::cout << "  round-trip error: " << round_trip << "\n";
  }
  return 0;
}

int cmd_spectra(int n, bool pretty, bool deep, int threads) {
  SignContext ctx = solve_signs(n, false);
  const int dim = ctx.outcome.nullspace_dimension();
  if (dim > 16 && !deep) {
    throw std::invalid_argument(
        "family has 2^" + std::to_string(dim) +
        " members; pass --deep to run a census this size");
  }
  auto entries = census(ctx.outcome, 1e-9, threads);

  json out;
  out["n"] = n;
  out["family_dimension"] = dim;
  out["members"] = std::uint64_t{1} << dim;
  out["distinct_spectra"] = entries.size();
  json cj = json::array();
  for (const auto& e : entries) {
    json ej;
    ej["spectrum"] = e.spectrum.values;
    ej["count"] = e.count;
    ej["representative"] = mask_to_bits(ctx.outcome, e.representative);
    cj.push_back(ej);
  }
  out["census"] = cj;

  if (!pretty) {
    emit(out);
    return 0;
  }
  std::cout << "spectra census of the origin phase-point operator, N = " << n
            << "\n  family dimension " << dim << " (" << (1ULL << dim)
            << " members), " << entries.size() << " distinct spectra\n";
  for (const auto& e : entries) {
    std::cout << "  count " << std::setw(8) << e.count << "  rep "
              << (dim ? mask_to_bits(ctx.outcome, e.representative) : "-")
              << "  [";
    for (std::size_t i = 0; i < e.spectrum.values.size(); ++i) {
      std::cout << (i ? ", " : "") << std::setprecision(6) << std::fixed
                << e.spectrum.values[i];
    }
    std::cout << "]\n";
  }
  return 0;
}

int cmd_verify(int n, bool pretty, std::uint64_t seed) {
  VerificationReport report = run_verification(n, seed);

  if (!pretty) {
    json out;
    out["n"] = n;
    out["seed"] = seed;
    out["all_passed"] = report.all_passed();
    json checks = json::array();
    for (const auto& c : report.checks) {
      checks.push_back(
          {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    out["checks"] = checks;
    emit(out);
  } else {
    std::cout << "verification battery, N = " << n << ", seed = " << seed
              << "\n";
    for (const auto& c : report.checks) {
      std::cout << "  " << (c.pass ? "PASS" : "FAIL") << "  " << std::left
                << std::setw(30) << c.name << " " << c.detail << "\n";
    }
  }
  return report.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finwig: discrete Wigner functions, sign systems, and "
               "tomography on the N x N phase grid"};
  app.require_subcommand(1);

  int n = 0;
  bool pretty = false, json_flag = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", n, "grid dimension N")
        ->required()
        ->check(CLI::Range(2, 1 << 20));
    CLI::Option* p = sub->add_flag("--pretty", pretty, "human-readable tables");
    sub->add_flag("--json", json_flag, "JSON output (the default)")
        ->excludes(p);
  };

  auto* lines_cmd = app.add_subcommand("lines", "enumerate isotropic lines");
  bool show_points = false;
  add_common(lines_cmd);
  lines_cmd->add_flag("--show-points", show_points,
                      "include per-line points and generators");

  auto* signs_cmd = app.add_subcommand("signs", "solve the sign system");
  bool include_type_b = false;
  add_common(signs_cmd);
  signs_cmd->add_flag(
      "--include-type-b", include_type_b,
      "also impose two-generator (Type-b) lines; inconsistent at even N");

  auto* wigner_cmd =
      app.add_subcommand("wigner", "Wigner function of a state");
  std::string state_path, sign_choice;
  add_common(wigner_cmd);
  wigner_cmd->add_option("--state", state_path,
                         "state file: {\"n\":N,\"re\":[[..]],\"im\":[[..]]}")
      ->required();
  wigner_cmd->add_option(
      "--sign-choice", sign_choice,
      "one bit per free sign, row-major free-point order, 0=+1 1=-1");

  auto* tomo_cmd = app.add_subcommand("tomo", "tomographic frame and "
                                              "reconstruction round trip");
  add_common(tomo_cmd);
  tomo_cmd->add_option("--state", state_path,
                       "optional state file for a reconstruction round trip");
  tomo_cmd->add_option("--sign-choice", sign_choice,
                       "family member selection, as in wigner");

  auto* spectra_cmd =
      app.add_subcommand("spectra", "census of origin-operator spectra");
  bool deep = false;
  int threads = 0;
  add_common(spectra_cmd);
  spectra_cmd->add_flag("--deep", deep,
                        "allow censuses beyond 2^16 members (minutes)");
  spectra_cmd->add_option("--threads", threads,
                          "worker threads (default: hardware)");

  auto* verify_cmd =
      app.add_subcommand("verify", "run the invariant battery");
  std::uint64_t seed = 20260825;
  add_common(verify_cmd);
  verify_cmd->add_option("--seed", seed, "RNG seed for sampled checks");

  CLI11_PARSE(app, argc, argv);

  try {
    check_dimension(n);
    if (lines_cmd->parsed()) return cmd_lines(n, pretty, show_points);
    if (signs_cmd->parsed()) return cmd_signs(n, pretty, include_type_b);
    if (wigner_cmd->parsed())
      return cmd_wigner(n, pretty, state_path, sign_choice);
    if (tomo_cmd->parsed())
      return cmd_tomo(n, pretty, state_path, sign_choice);
    if (spectra_cmd->parsed()) return cmd_spectra(n, pretty, deep, threads);
    if (verify_cmd->parsed()) return cmd_verify(n, pretty, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
