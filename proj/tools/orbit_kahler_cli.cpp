// orbit-kahler: command-line front end for the orbit_kahler library.
//
// Exit codes: 0 success, 2 input/parse error, 3 domain validation failure,
// 4 uncertainty bound violated (a library bug), 5 check-suite failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orbit_kahler/orbit_kahler.hpp"

namespace ok = orbit_kahler;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;
constexpr int kExitViolation = 4;
constexpr int kExitChecks = 5;

int exit_code_for(ok::ErrorKind kind) {
  switch (kind) {
    case ok::ErrorKind::ParseError:
    case ok::ErrorKind::DimMismatch:
    case ok::ErrorKind::InvalidArgument:
      return kExitInput;
    default:
      return kExitDomain;
  }
}

struct GlobalOptions {
  std::string config_path;
  std::optional<double> hbar, tol, fd_step;
  std::optional<std::uint64_t> seed;
};

ok::Config resolve_config(const GlobalOptions& g) {
  ok::Config cfg;
  if (!g.config_path.empty()) cfg = ok::config_from_json(ok::read_json_file(g.config_path), cfg);
  if (g.hbar) cfg.hbar = *g.hbar;
  if (g.tol) cfg.tau_check = *g.tol;
  if (g.fd_step) cfg.fd_step = *g.fd_step;
  cfg.validate();
  return cfg;
}

std::uint64_t resolve_seed(const GlobalOptions& g) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("ORBIT_KAHLER_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ok::Error(ok::ErrorKind::ParseError, "ORBIT_KAHLER_SEED is not an integer");
    }
  }
  return 0;
}

ok::HermitianOperator load_operator(const std::string& path, const ok::Config& cfg) {
  return ok::make_hermitian(ok::matrix_from_json(ok::read_json_file(path)), cfg);
}

ok::OrbitPoint load_point(const std::string& path, const ok::Config& cfg) {
  return ok::orbit_point(load_operator(path, cfg), cfg);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ok::Error(ok::ErrorKind::ParseError, "cannot write " + out_path);
  out << text;
}

ok::json complex_json(std::complex<double> z) { return ok::json{{"re", z.real()}, {"im", z.imag()}}; }

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ok::Error(ok::ErrorKind::ParseError, "bad integer list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ok::Error(ok::ErrorKind::ParseError, "empty integer list");
  return out;
}

ok::Matrix diagonal_state(const ok::Spectrum& s, const ok::Config& cfg) {
  ok::validate_density_spectrum(s, cfg);
  const auto d = s.diagonal();
  ok::Matrix m = ok::Matrix::Zero(static_cast<ok::Index>(d.size()), static_cast<ok::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<ok::Index>(i), static_cast<ok::Index>(i)) = d[i];
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kaehler geometry of density-operator orbits and geometric uncertainty bounds"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON file with Config fields")->check(CLI::ExistingFile);
  app.add_option("--hbar", g.hbar, "reduced Planck constant");
  app.add_option("--tol", g.tol, "residual tolerance for derived identities (tau_check)");
  app.add_option("--fd-step", g.fd_step, "finite-difference step");
  app.add_option("--seed", g.seed, "random seed (fallback: ORBIT_KAHLER_SEED, then 0)");

  std::string out_path;

  // spectrum
  std::string rho_file;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "clustered spectrum and eigenframe of a density matrix");
  spectrum_cmd->add_option("rho", rho_file, "density matrix JSON")->required();
  spectrum_cmd->add_option("-o,--out", out_path, "output file");

  // tangent
  std::string h_file;
  auto* tangent_cmd = app.add_subcommand("tangent", "tangent vector of a generator and its kernel split");
  tangent_cmd->add_option("rho", rho_file, "density matrix JSON")->required();
  tangent_cmd->add_option("generator", h_file, "Hermitian generator JSON")->required();
  tangent_cmd->add_option("-o,--out", out_path, "output file");

  // kahler
  std::string a_file, b_file;
  auto* kahler_cmd = app.add_subcommand("kahler", "omega, g and h for the fields of two observables");
  kahler_cmd->add_option("rho", rho_file, "density matrix JSON")->required();
  kahler_cmd->add_option("a", a_file, "observable A JSON")->required();
  kahler_cmd->add_option("b", b_file, "observable B JSON")->required();
  kahler_cmd->add_option("-o,--out", out_path, "output file");

  // uncertainty
  std::string csv_path;
  auto* unc_cmd = app.add_subcommand("uncertainty", "geometric and Robertson-Schroedinger bounds");
  unc_cmd->add_option("rho", rho_file, "density matrix JSON")->required();
  unc_cmd->add_option("a", a_file, "observable A JSON")->required();
  unc_cmd->add_option("b", b_file, "observable B JSON")->required();
  unc_cmd->add_option("--csv", csv_path, "append deltaA,deltaB,product,geom,rs to this CSV");
  unc_cmd->add_option("-o,--out", out_path, "output file");

  // checks
  std::string dims_text = "2,3,4,5,6,7,8", spectra_file;
  int samples = 1000;
  bool quick = false;
  double perturb_j = 0.0;
  auto* checks_cmd = app.add_subcommand("checks", "run the invariant check suite");
  checks_cmd->add_option("--dims", dims_text, "comma-separated dimensions");
  checks_cmd->add_option("--spectra", spectra_file, "JSON array of spectra (overrides --dims)")
      ->check(CLI::ExistingFile);
  checks_cmd->add_option("--samples", samples, "samples per check");
  checks_cmd->add_flag("--quick", quick, "cap samples at 100");
  checks_cmd->add_option("--perturb-J", perturb_j, "test hook: add eps*X to J in the J^2 check");
  checks_cmd->add_option("-o,--out", out_path, "output file");

  // evolve
  double t_max = 1.0;
  int steps = 11;
  auto* evolve_cmd = app.add_subcommand("evolve", "sample the unitary flow of a Hamiltonian (JSON lines)");
  evolve_cmd->add_option("rho", rho_file, "density matrix JSON")->required();
  evolve_cmd->add_option("hamiltonian", h_file, "Hamiltonian JSON")->required();
  evolve_cmd->add_option("--t-max", t_max, "final time");
  evolve_cmd->add_option("--steps", steps, "number of samples including t = 0");
  evolve_cmd->add_option("-o,--out", out_path, "output file");

  // sweep
  std::string qubit_grid, grid_file;
  bool random_frame = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "bounds over a grid of states (CSV)");
  sweep_cmd->add_option("--qubit-grid", qubit_grid, "lo:hi:count, states diag(p, 1-p)");
  sweep_cmd->add_option("--grid", grid_file, "JSON array of matrices or spectra")->check(CLI::ExistingFile);
  sweep_cmd->add_flag("--random-frame", random_frame, "rotate spectrum grid entries by a seeded Haar unitary");
  sweep_cmd->add_option("--a", a_file, "observable A JSON (random when absent)");
  sweep_cmd->add_option("--b", b_file, "observable B JSON (random when absent)");
  sweep_cmd->add_option("-o,--out", out_path, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    const ok::Config cfg = resolve_config(g);
    const std::uint64_t seed = resolve_seed(g);

    if (*spectrum_cmd) {
      const auto p = load_point(rho_file, cfg);
      auto j = ok::spectrum_to_json(p.spectrum());
      j["frame"] = ok::matrix_to_json(p.frame());
      emit(j.dump() + "\n", out_path);
      return 0;
    }

    if (*tangent_cmd) {
      const auto p = load_point(rho_file, cfg);
      const auto h = load_operator(h_file, cfg);
      const auto x = ok::tangent_map(h, p, cfg);
      const auto [kernel, complement] = ok::split_kernel(h, p);
      ok::json j{{"tangent", ok::matrix_to_json(x.ambient().matrix())},
                 {"kernel_part", ok::matrix_to_json(kernel.matrix())},
                 {"complement_part", ok::matrix_to_json(complement.matrix())},
                 {"lift", ok::matrix_to_json(ok::lift(x, cfg).matrix())}};
      emit(j.dump() + "\n", out_path);
      return 0;
    }

    if (*kahler_cmd) {
      const auto p = load_point(rho_file, cfg);
      const auto a = load_operator(a_file, cfg);
      const auto b = load_operator(b_file, cfg);
      const auto e = ok::evaluate_kahler(ok::hamiltonian_vector_field(a, p, cfg),
                                         ok::hamiltonian_vector_field(b, p, cfg), cfg);
      const auto h_blocks =
          ok::hermitian_product_blocks(ok::split_kernel(a, p).second, ok::split_kernel(b, p).second, p, cfg);
      ok::json j{{"omega", e.omega},
                 {"omega_generators", ok::symplectic(a, b, p, cfg)},
                 {"metric", e.metric},
                 {"h", complex_json(e.h)},
                 {"h_blocks", complex_json(h_blocks)}};
      emit(j.dump() + "\n", out_path);
      return 0;
    }

    if (*unc_cmd) {
      const auto p = load_point(rho_file, cfg);
      const auto a = load_operator(a_file, cfg);
      const auto b = load_operator(b_file, cfg);
      const auto r = ok::full_report(a, b, p, cfg);
      emit(ok::report_to_json(r).dump() + "\n", out_path);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::app);
        if (!csv) throw ok::Error(ok::ErrorKind::ParseError, "cannot append to " + csv_path);
        auto num = [](double v) { return ok::json(v).dump(); };
        csv << num(r.deltaA) << ',' << num(r.deltaB) << ',' << num(r.product) << ','
            << num(r.geometric_bound) << ',' << num(r.rs_bound) << '\n';
      }
      if (r.slack_geometric < -cfg.tau_check || r.slack_rs < -cfg.tau_check) {
        std::cerr << "internal error: uncertainty bound violated\n";
        return kExitViolation;
      }
      return 0;
    }

    if (*checks_cmd) {
      ok::SuiteOptions opt;
      opt.cfg = cfg;
      opt.seed = seed;
      opt.samples = quick ? std::min(samples, 100) : samples;
      opt.perturb_j = perturb_j;
      if (!spectra_file.empty()) {
        const auto arr = ok::read_json_file(spectra_file);
        if (!arr.is_array()) throw ok::Error(ok::ErrorKind::ParseError, "--spectra expects a JSON array");
        for (const auto& s : arr) {
          opt.spectra.push_back(ok::spectrum_from_json(s));
          ok::validate_density_spectrum(opt.spectra.back(), cfg);
        }
      } else {
        opt.dims = parse_int_list(dims_text);
      }
      const auto reports = ok::run_check_suite(opt);
      emit(ok::suite_to_json(reports).dump(2) + "\n", out_path);
      for (const auto& r : reports)
        if (!r.passed) {
          std::cerr << "check failed: " << r.check_name << " (max_residual " << r.max_residual
                    << " > " << r.tolerance << ")\n";
          return kExitChecks;
        }
      return 0;
    }

    if (*evolve_cmd) {
      const auto p = load_point(rho_file, cfg);
      const auto h = load_operator(h_file, cfg);
      emit(ok::trajectory_to_jsonl(ok::trajectory(p, h, t_max, steps, cfg)), out_path);
      return 0;
    }

    if (*sweep_cmd) {
      ok::SweepOptions opt;
      opt.cfg = cfg;
      opt.seed = seed;
      if (qubit_grid.empty() == grid_file.empty())
        throw ok::Error(ok::ErrorKind::ParseError, "give exactly one of --qubit-grid or --grid");
      if (!qubit_grid.empty()) {
        double lo = 0, hi = 0;
        int count = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(qubit_grid);
        if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || !in.eof())
          throw ok::Error(ok::ErrorKind::ParseError, "--qubit-grid expects lo:hi:count");
        opt.states = ok::qubit_grid(lo, hi, count);
      } else {
        const auto arr = ok::read_json_file(grid_file);
        if (!arr.is_array() || arr.empty())
          throw ok::Error(ok::ErrorKind::ParseError, "--grid expects a non-empty JSON array");
        ok::Rng frame_rng(ok::detail::mix_seed(seed, 0xF7A3E));
        for (const auto& item : arr) {
          if (item.contains("n")) {
            opt.states.push_back(ok::matrix_from_json(item));
            continue;
          }
          ok::Matrix m = diagonal_state(ok::spectrum_from_json(item), cfg);
          if (random_frame) {
            const ok::Matrix u = ok::random_unitary(m.rows(), frame_rng);
            m = u * m * u.adjoint();
          }
          opt.states.push_back(m);
        }
      }
      if (!a_file.empty()) opt.a = load_operator(a_file, cfg);
      if (!b_file.empty()) opt.b = load_operator(b_file, cfg);
      emit(ok::run_sweep(opt), out_path);
      return 0;
    }
  } catch (const ok::Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
