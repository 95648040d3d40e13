// symq: command-line front end for the symmetric-spin toolkit.
//
// Subcommands: decompose, blockdiag, stars, hermite, murnaghan, entangle,
// scan, rotosensor.  Exit codes: 0 success, 2 input error, 3 numerical
// non-convergence.  SYMQ_THREADS caps the worker count of the parallel
// subcommands.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symq/block_diag.hpp"
#include "symq/canonical.hpp"
#include "symq/decompose.hpp"
#include "symq/entanglement.hpp"
#include "symq/isomorphisms.hpp"
#include "symq/json_io.hpp"
#include "symq/rotosensor.hpp"
#include "symq/sym_space.hpp"
#include "symq/wedge_space.hpp"

namespace {

using namespace symq;

// Numerical failure that should exit 3 rather than 2.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Writes to the named file, or to stdout for "-".
class OutStream {
public:
  explicit OutStream(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::invalid_argument("cannot open " + path + " for writing");
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

void emit_json(const std::string& path, const nlohmann::json& j) {
  OutStream out(path);
  out.get() << j.dump(2) << '\n';
}

HalfInt parse_spin(const std::string& text) {
  HalfInt s = HalfInt::parse(text);
  if (s.twice() < 0) throw std::invalid_argument("spin must be nonnegative: " + text);
  return s;
}

Vec3 parse_axis(const std::string& text) {
  std::istringstream in(text);
  double x, y, z;
  char c1, c2;
  if (!(in >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',' || (in >> std::ws, !in.eof()))
    throw std::invalid_argument("axis: expected x,y,z, got \"" + text + "\"");
  Vec3 n(x, y, z);
  if (n.norm() == 0.0) throw std::invalid_argument("axis: zero vector");
  return n / n.norm();
}

std::string j_label(int twice_j) {
  if (twice_j % 2 == 0) return std::to_string(twice_j / 2);
  return std::to_string(twice_j) + "/2";
}

// ---------------------------------------------------------------- decompose

void run_decompose(const std::string& spin, int parties, bool wedge) {
  HalfInt s = parse_spin(spin);
  if (parties < 1) throw std::invalid_argument("parties must be positive");
  if (wedge) {
    MultTable t = wedge_multiplicities(s, parties);
    std::cout << "wedge^" << parties << " of spin " << s.str() << ": dim "
              << wedge_dim(s.multiplet_dim(), parties) << '\n';
    for (const auto& [twice_j, mult] : t)
      std::cout << "j=" << j_label(twice_j) << ": " << mult << '\n';
    std::cout << "method: strict-weight-recursion\n";
    return;
  }
  MultTable a = multiplicities(s, parties, MultMethod::integral);
  MultTable b = multiplicities(s, parties, MultMethod::recursion);
  MultTable c = multiplicities(s, parties, MultMethod::genfunc);
  std::cout << "vee^" << parties << " of spin " << s.str() << ": dim "
            << sym_dim(s.multiplet_dim(), parties) << '\n';
  for (const auto& [twice_j, mult] : b)
    std::cout << "j=" << j_label(twice_j) << ": " << mult << '\n';
  if (a != b || b != c)
    throw NonConvergence("multiplicity methods disagree");
  std::cout << "methods agree: character-integral, weight-recursion, gaussian-binomial\n";
}

// ---------------------------------------------------------------- blockdiag

nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(detail::complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void run_blockdiag(const std::string& spin, int parties, bool wedge, const std::string& out) {
  HalfInt s = parse_spin(spin);
  if (parties < 1) throw std::invalid_argument("parties must be positive");
  BlockDiagonalizer bd = wedge ? wedge_block_diagonalizer(s, parties)
                               : block_diagonalizer(s, parties);
  nlohmann::json layout = nlohmann::json::array();
  for (const BlockInfo& blk : bd.layout)
    layout.push_back({{"j2", blk.twice_j},
                      {"alpha", blk.alpha},
                      {"offset", blk.offset},
                      {"dim", blk.dim()}});
  emit_json(out, {{"spin2", s.twice()},
                  {"parties", parties},
                  {"space", wedge ? "wedge" : "sym"},
                  {"layout", layout},
                  {"U", matrix_to_json(bd.U)}});
}

// -------------------------------------------------------------------- stars

void stars_csv(std::ostream& os, const std::string& label, const Constellation& c) {
  for (const Vec3& n : c.stars) {
    double z = std::min(1.0, std::max(-1.0, n.z()));
    os << label << ',' << fmt17(std::acos(z)) << ',' << fmt17(std::atan2(n.y(), n.x()))
       << "\r\n";
  }
}

void run_stars(const std::string& state_path, bool canonical, bool csv,
               const std::string& out) {
  SymState state = state_from_json(load_json(state_path));
  BlockDiagonalizer bd = block_diagonalizer(state.s, state.k);

  if (canonical) {
    Multiconstellation mc = multiconstellation(state, bd);
    OutStream os(out);
    if (csv) {
      os.get() << "block,theta,phi\r\n";
      for (const BlockConstellation& b : mc.blocks) {
        if (b.zero) continue;
        stars_csv(os.get(), "j" + std::to_string(b.twice_j) + "a" + std::to_string(b.alpha),
                  b.stars);
      }
      stars_csv(os.get(), "spectator", mc.spectator);
    } else {
      os.get() << multiconstellation_to_json(mc).dump(2) << '\n';
    }
    return;
  }

  // Raw per-block stars with weight magnitudes; no section is applied, so
  // phases and the spectator are left out.
  SymState blk = to_basis(state, Basis::block, &bd);
  double total = blk.amp.norm();
  if (total == 0.0) throw std::invalid_argument("amplitudes: zero state");
  nlohmann::json blocks = nlohmann::json::array();
  OutStream os(out);
  if (csv) os.get() << "block,theta,phi\r\n";
  for (std::size_t b = 0; b < bd.layout.size(); ++b) {
    Vec comp = bd.block_component(blk.amp, b);
    bool zero = comp.norm() <= 1e-12 * total;
    Constellation c;
    if (!zero)
      c = majorana_roots(Spinor{HalfInt::from_twice(bd.layout[b].twice_j), comp});
    if (csv) {
      if (!zero)
        stars_csv(os.get(),
                  "j" + std::to_string(bd.layout[b].twice_j) + "a" +
                      std::to_string(bd.layout[b].alpha),
                  c);
    } else {
      blocks.push_back({{"j2", bd.layout[b].twice_j},
                        {"alpha", bd.layout[b].alpha},
                        {"zero", zero},
                        {"weight", comp.norm() / total},
                        {"stars", detail::stars_to_json(c)}});
    }
  }
  if (!csv)
    os.get() << nlohmann::json{{"spin2", state.s.twice()},
                               {"parties", state.k},
                               {"blocks", blocks}}
                    .dump(2)
             << '\n';
}

// ---------------------------------------------------- hermite and murnaghan

void run_hermite(const std::string& state_path, const std::string& out) {
  nlohmann::json j = load_json(state_path);
  if (json_is_wedge(j))
    throw std::invalid_argument("space: the dual-pair map takes symmetric states");
  SymState state = state_from_json(j);
  SymState std_state = to_basis(state, Basis::standard);
  Mat H = hermite_matrix(state.s, state.k);
  SymState image{HalfInt::from_twice(state.k), state.s.twice(), Basis::standard,
                 H * std_state.amp};
  emit_json(out, state_to_json(image));
}

void run_murnaghan(const std::string& state_path, const std::string& out) {
  nlohmann::json j = load_json(state_path);
  if (json_is_wedge(j)) {
    WedgeState w = wedge_from_json(j);
    if (w.s.twice() < w.k - 1)
      throw std::invalid_argument("spin2: too small for a symmetric preimage");
    HalfInt s = HalfInt::from_twice(w.s.twice() - (w.k - 1));
    WedgeState std_state = to_basis(w, Basis::standard);
    Mat M = murnaghan_matrix(s, w.k);
    SymState image{s, w.k, Basis::standard, M.adjoint() * std_state.amp};
    emit_json(out, state_to_json(image));
    return;
  }
  SymState state = state_from_json(j);
  SymState std_state = to_basis(state, Basis::standard);
  Mat M = murnaghan_matrix(state.s, state.k);
  WedgeState image{HalfInt::from_twice(state.s.twice() + state.k - 1), state.k,
                   Basis::standard, M * std_state.amp};
  emit_json(out, state_to_json(image));
}

// ----------------------------------------------------------------- entangle

int run_entangle(const std::string& state_path, int restarts, double tol, int grid,
                 std::uint64_t seed, const std::string& out) {
  SymState state = state_from_json(load_json(state_path));
  EntanglementOptions opt;
  opt.restarts = restarts;
  opt.grad_tol = tol;
  opt.grid_starts = grid;
  opt.seed = seed;
  EntanglementResult res = geometric_entanglement(state, opt);
  emit_json(out, {{"E", res.E},
                  {"E_tilde", res.E_tilde},
                  {"maximizer", detail::amplitudes_to_json(res.maximizer)},
                  {"residual", res.residual},
                  {"restarts_used", res.restarts_used},
                  {"converged", res.converged},
                  {"degenerate", res.degenerate}});
  return res.converged ? 0 : 3;
}

// --------------------------------------------------------------------- scan

void run_scan(const std::string& spin, int parties, std::int64_t samples,
              const std::string& measure, std::uint64_t seed, const std::string& out) {
  HalfInt s = parse_spin(spin);
  if (parties < 2) throw std::invalid_argument("parties: a scan needs at least 2");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  Measure m = measure_from_name(measure);
  std::vector<ScanRecord> records = scan(s, parties, samples, m, seed);
  OutStream os(out);
  write_scan_csv(os.get(), s, parties, records, m, seed);
}

// --------------------------------------------------------------- rotosensor

void run_rotosensor(const std::string& state_path, const std::string& mode,
                    double eta, bool have_eta, const std::string& axis_text,
                    double eta_max, int steps, const std::string& out) {
  Vec3 axis = parse_axis(axis_text);
  nlohmann::json j = load_json(state_path);

  if (json_is_wedge(j)) {
    WedgeState w = to_basis(wedge_from_json(j), Basis::standard);
    if (mode != "axis")
      throw std::invalid_argument("mode: wedge states support only --mode axis");
    double v = variance_about_axis(w, axis);
    double i3 = (variance_about_axis(w, Vec3::UnitX()) +
                 variance_about_axis(w, Vec3::UnitY()) +
                 variance_about_axis(w, Vec3::UnitZ())) / 3.0;
    emit_json(out, {{"axis", {axis.x(), axis.y(), axis.z()}},
                    {"variance", v},
                    {"averaged_infinitesimal", i3}});
    return;
  }

  SymState state = state_from_json(j);
  if (mode == "axis") {
    SymState std_state = to_basis(state, Basis::standard);
    emit_json(out, {{"axis", {axis.x(), axis.y(), axis.z()}},
                    {"variance", variance_about_axis(std_state, axis)},
                    {"averaged_infinitesimal", averaged_infinitesimal(std_state)}});
    return;
  }
  if (mode == "fidelity") {
    if (!have_eta) throw std::invalid_argument("eta: required for --mode fidelity");
    SymState std_state = to_basis(state, Basis::standard);
    emit_json(out, {{"eta", eta},
                    {"axis", {axis.x(), axis.y(), axis.z()}},
                    {"fidelity", fidelity(std_state, eta, axis)}});
    return;
  }
  if (mode != "averaged")
    throw std::invalid_argument("mode: expected axis, averaged or fidelity");

  BlockDiagonalizer bd = block_diagonalizer(state.s, state.k);
  if (have_eta) {
    emit_json(out, {{"eta", eta},
                    {"f_avg_closed", averaged_fidelity(state, eta, bd)},
                    {"f_avg_quadrature", averaged_fidelity_quadrature(state, eta, bd)}});
    return;
  }
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  OutStream os(out);
  os.get() << "eta,F_avg_closed,F_avg_quadrature\r\n";
  for (int i = 0; i <= steps; ++i) {
    double e = eta_max * i / steps;
    os.get() << fmt17(e) << ',' << fmt17(averaged_fidelity(state, e, bd)) << ','
             << fmt17(averaged_fidelity_quadrature(state, e, bd)) << "\r\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetric multi-spin toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  // decompose
  std::string de_spin;
  int de_parties = 1;
  bool de_wedge = false;
  CLI::App* de = app.add_subcommand("decompose", "collective-spin multiplicity table");
  de->add_option("--spin", de_spin, "single-party spin (2, 3/2 or 1.5)")->required();
  de->add_option("--parties", de_parties, "number of parties")->required();
  de->add_flag("--wedge", de_wedge, "decompose the antisymmetric power instead");
  de->callback([&] { run_decompose(de_spin, de_parties, de_wedge); });

  // blockdiag
  std::string bd_spin, bd_out = "-";
  int bd_parties = 1;
  bool bd_wedge = false;
  CLI::App* bdc = app.add_subcommand("blockdiag", "block-diagonalizing unitary as JSON");
  bdc->add_option("--spin", bd_spin, "single-party spin")->required();
  bdc->add_option("--parties", bd_parties, "number of parties")->required();
  bdc->add_flag("--wedge", bd_wedge, "diagonalize the antisymmetric power instead");
  bdc->add_option("--out", bd_out, "output file, - for stdout");
  bdc->callback([&] { run_blockdiag(bd_spin, bd_parties, bd_wedge, bd_out); });

  // stars
  std::string st_state, st_out = "-";
  bool st_canonical = false, st_csv = false;
  CLI::App* st = app.add_subcommand("stars", "per-block star constellations");
  st->add_option("--state", st_state, "input state file")->required();
  st->add_flag("--canonical", st_canonical, "apply the canonical section: weights and spectator");
  st->add_flag("--csv", st_csv, "emit (theta, phi) CSV instead of JSON");
  st->add_option("--out", st_out, "output file, - for stdout");
  st->callback([&] { run_stars(st_state, st_canonical, st_csv, st_out); });

  // hermite
  std::string he_state, he_out = "-";
  CLI::App* he = app.add_subcommand("hermite", "dual-pair image of a symmetric state");
  he->add_option("--state", he_state, "input state file")->required();
  he->add_option("--out", he_out, "output file, - for stdout");
  he->callback([&] { run_hermite(he_state, he_out); });

  // murnaghan
  std::string mu_state, mu_out = "-";
  CLI::App* mu = app.add_subcommand("murnaghan",
                                    "antisymmetric image of a symmetric state, or back");
  mu->add_option("--state", mu_state, "input state file")->required();
  mu->add_option("--out", mu_out, "output file, - for stdout");
  mu->callback([&] { run_murnaghan(mu_state, mu_out); });

  // entangle
  std::string en_state, en_out = "-";
  int en_restarts = 64, en_grid = 0;
  double en_tol = 1e-12;
  std::uint64_t en_seed = 0x5E3D1A7C9B42F0ULL;
  CLI::App* en = app.add_subcommand("entangle", "geometric entanglement of a symmetric state");
  en->add_option("--state", en_state, "input state file")->required();
  en->add_option("--restarts", en_restarts, "random restarts");
  en->add_option("--tol", en_tol, "gradient norm tolerance");
  en->add_option("--grid", en_grid, "extra coherent grid starts (spin-1/2 factors)");
  en->add_option("--seed", en_seed, "RNG seed");
  en->add_option("--out", en_out, "output file, - for stdout");
  en->callback([&] { exit_code = run_entangle(en_state, en_restarts, en_tol, en_grid,
                                              en_seed, en_out); });

  // scan
  std::string sc_spin, sc_measure = "haar", sc_out;
  int sc_parties = 2;
  std::int64_t sc_samples = 1000;
  std::uint64_t sc_seed = 0;
  CLI::App* sc = app.add_subcommand("scan",
                                    "Gram spectrum vs entanglement over random product states");
  sc->add_option("--spin", sc_spin, "single-party spin")->required();
  sc->add_option("--parties", sc_parties, "number of parties")->required();
  sc->add_option("--samples", sc_samples, "number of samples")->required();
  sc->add_option("--measure", sc_measure, "haar or stars");
  sc->add_option("--seed", sc_seed, "RNG seed");
  sc->add_option("--out", sc_out, "output CSV, - for stdout")->required();
  sc->callback([&] { run_scan(sc_spin, sc_parties, sc_samples, sc_measure, sc_seed, sc_out); });

  // rotosensor
  std::string ro_state, ro_mode = "axis", ro_axis = "0,0,1", ro_out = "-";
  double ro_eta = 0.0, ro_eta_max = 2.0 * std::acos(-1.0);
  int ro_steps = 64;
  CLI::App* ro = app.add_subcommand("rotosensor", "rotation-sensing figures of merit");
  ro->add_option("--state", ro_state, "input state file")->required();
  ro->add_option("--mode", ro_mode, "axis, averaged or fidelity");
  CLI::Option* eta_opt = ro->add_option("--eta", ro_eta, "rotation angle");
  ro->add_option("--axis", ro_axis, "rotation axis x,y,z");
  ro->add_option("--eta-max", ro_eta_max, "sweep end angle (averaged mode)");
  ro->add_option("--steps", ro_steps, "sweep step count (averaged mode)");
  ro->add_option("--out", ro_out, "output file, - for stdout");
  ro->callback([&] {
    run_rotosensor(ro_state, ro_mode, ro_eta, eta_opt->count() > 0, ro_axis, ro_eta_max,
                   ro_steps, ro_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return exit_code;
}
