#pragma once

// Invariant suite and parameter sweeps shared by the CLI and the acceptance tests.
//
// Every check draws its instances from mix_seed(seed, sample), so reports are
// reproducible for a fixed (options, seed) pair.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "orbit_kahler/integrability.hpp"

namespace orbit_kahler {

struct SuiteOptions {
  std::vector<int> dims = {2, 3, 4, 5, 6, 7, 8};
  std::vector<Spectrum> spectra;  // when non-empty, replaces random spectra over `dims`
  int samples = 1000;
  std::uint64_t seed = 0;
  double perturb_j = 0.0;  // fault injection for the J^2 check
  Config cfg;
};

/// Multiplicity pattern for `dim` with 1..4 clusters of size at most 3.
inline std::vector<int> random_pattern(int dim, Rng& rng) {
  const int k_min = std::max(1, (dim + 2) / 3);
  const int k_max = std::min(4, dim);
  std::uniform_int_distribution<int> pick_k(k_min, k_max);
  const int k = pick_k(rng);
  std::vector<int> mults(static_cast<std::size_t>(k), 1);
  int left = dim - k;
  while (left > 0) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    auto& m = mults[static_cast<std::size_t>(pick(rng))];
    if (m < 3) {
      ++m;
      --left;
    }
  }
  return mults;
}

namespace detail {

/// Hermitian matrix with unit Frobenius norm.
inline HermitianOperator unit_hermitian(Index dim, Rng& rng) {
  auto h = random_hermitian(dim, rng);
  return (1.0 / h.matrix().norm()) * h;
}

inline json point_json(const OrbitPoint& p) {
  return json{{"rho", matrix_to_json(p.rho().matrix())}, {"spectrum", spectrum_to_json(p.spectrum())}};
}

struct Instance {
  OrbitPoint point;
  HermitianOperator a, b, c;
};

inline Instance draw_instance(const SuiteOptions& opt, int s, Rng& rng) {
  Spectrum spectrum;
  if (!opt.spectra.empty()) {
    spectrum = opt.spectra[static_cast<std::size_t>(s) % opt.spectra.size()];
  } else {
    const int dim = opt.dims[static_cast<std::size_t>(s) % opt.dims.size()];
    spectrum = random_spectrum(random_pattern(dim, rng), rng);
  }
  auto p = random_density(spectrum, rng, opt.cfg);
  const Index n = p.dim();
  auto a = unit_hermitian(n, rng);
  auto b = unit_hermitian(n, rng);
  auto c = unit_hermitian(n, rng);
  return {std::move(p), std::move(a), std::move(b), std::move(c)};
}

inline CheckReport make_report(std::string name, double tolerance) {
  CheckReport r;
  r.check_name = std::move(name);
  r.tolerance = tolerance;
  return r;
}

/// Rounding level of an extended-precision central difference with step h,
/// about ten machine epsilons divided by h.
inline double roundoff_floor(double h) { return 1e-18 / h; }

/// Worst deviation of step-halving ratios from 4. Only consecutive pairs with
/// both residuals above their rounding floor are compared; a sweep that never
/// leaves the floor gives 0.
inline double ratio_deviation(const StepHalving& sweep) {
  double dev = 0;
  for (std::size_t i = 0; i + 1 < sweep.residuals.size(); ++i) {
    const double r0 = sweep.residuals[i], r1 = sweep.residuals[i + 1];
    if (r0 <= roundoff_floor(sweep.steps[i]) || r1 <= roundoff_floor(sweep.steps[i + 1])) continue;
    dev = std::max(dev, std::abs(r0 / r1 - 4.0));
  }
  return dev;
}

}  // namespace detail

/// Runs every invariant check; one report per check, in a fixed order.
inline std::vector<CheckReport> run_check_suite(const SuiteOptions& opt) {
  if (opt.samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be >= 1");
  if (opt.spectra.empty() && opt.dims.empty())
    throw Error(ErrorKind::InvalidArgument, "need dims or spectra");
  const Config& cfg = opt.cfg;
  const double hbar = cfg.hbar;

  auto j_squared = detail::make_report("j_squared", 1e-10);
  auto lift_roundtrip = detail::make_report("lift_roundtrip", 1e-10);
  auto omega_antisym = detail::make_report("omega_antisymmetry", 1e-10);
  auto metric_sym = detail::make_report("metric_symmetry", 1e-10);
  auto compat = detail::make_report("compatibility", 1e-10);
  auto h_herm = detail::make_report("h_hermitian_symmetry", 1e-10);
  auto im_h = detail::make_report("im_h_equals_omega", 1e-12);
  auto block_formula = detail::make_report("block_formula", 1e-9);
  auto involutivity = detail::make_report("involutivity", 1e-12);
  auto nondegeneracy = detail::make_report("nondegeneracy", cfg.tau_check);
  auto nijenhuis = detail::make_report("nijenhuis_fd", 1e-6);
  auto nijenhuis_conv = detail::make_report("nijenhuis_convergence", 0.5);
  auto closedness = detail::make_report("closedness_fd", 1e-6);
  auto closedness_conv = detail::make_report("closedness_convergence", 0.5);
  auto geometric = detail::make_report("geometric_uncertainty", 1e-10);
  auto robertson = detail::make_report("robertson_schrodinger", 1e-10);
  auto decomposition = detail::make_report("variance_decomposition", 1e-10);
  auto pure_equality = detail::make_report("pure_state_equality", 1e-10);
  auto equivariance = detail::make_report("equivariance", 1e-9);
  auto gauge = detail::make_report("gauge_invariance", 1e-9);
  auto spectrum_drift = detail::make_report("spectrum_preservation", 1e-10);
  auto composition = detail::make_report("flow_composition", 1e-10);
  auto ehrenfest = detail::make_report("ehrenfest", 1e-6);
  auto ehrenfest_conv = detail::make_report("ehrenfest_convergence", 0.5);

  // Finite-difference checks are ~100x costlier per sample.
  const int fd_every = std::max(1, opt.samples / 20);

  for (int s = 0; s < opt.samples; ++s) {
    const std::uint64_t sample_seed = detail::mix_seed(opt.seed, static_cast<std::uint64_t>(s));
    Rng rng(sample_seed);
    const auto inst = detail::draw_instance(opt, s, rng);
    const auto& p = inst.point;
    const auto& a = inst.a;
    const auto& b = inst.b;
    auto where = [&] { return json{{"point", detail::point_json(p)}, {"sample", s}}; };

    const auto xa = tangent_map(a, p, cfg);
    const auto xb = tangent_map(b, p, cfg);

    // J^2 = -1 (with optional injected fault J -> J + eps)
    auto j_op = [&](const TangentVector& x) {
      auto jx = apply_complex_structure(x, cfg);
      return opt.perturb_j == 0.0 ? jx : jx + opt.perturb_j * x;
    };
    j_squared.record(detail::max_abs(Matrix(j_op(j_op(xa)).ambient().matrix() + xa.ambient().matrix())),
                     where);
    lift_roundtrip.record(
        detail::max_abs(Matrix(tangent_map(lift(xa, cfg), p, cfg).ambient().matrix() - xa.ambient().matrix())),
        where);

    omega_antisym.record(std::abs(symplectic(a, b, p, cfg) + symplectic(b, a, p, cfg)), where);
    const double gab = metric(xa, xb, cfg), gba = metric(xb, xa, cfg);
    metric_sym.record(std::abs(gab - gba), where);
    const auto jxa = apply_complex_structure(xa, cfg), jxb = apply_complex_structure(xb, cfg);
    const double w = symplectic_tangent(xa, xb, cfg);
    compat.record(std::abs(symplectic_tangent(jxa, jxb, cfg) - w), where);
    const auto hab = hermitian_product(xa, xb, cfg), hba = hermitian_product(xb, xa, cfg);
    h_herm.record(std::abs(hab - std::conj(hba)), where);
    im_h.record(std::abs(hab.imag() - w), where);

    const auto [ka, ca] = split_kernel(a, p);
    const auto [kb, cb] = split_kernel(b, p);
    const auto h_blocks = hermitian_product_blocks(ca, cb, p, cfg);
    block_formula.record(std::abs(h_blocks - hab) / std::max(std::abs(hab), 1e-12), where);

    const auto inv = involutivity_check(p, 1, sample_seed, cfg);
    involutivity.record(inv.max_residual, where);
    const auto nd = nondegeneracy_check(p, 1, sample_seed, cfg);
    nondegeneracy.record(nd.max_residual, where);

    // Uncertainty relations
    const auto rep = full_report(a, b, p, cfg);
    geometric.record(std::max(0.0, rep.geometric_bound - rep.product), where);
    robertson.record(std::max(0.0, rep.rs_bound - rep.product), where);
    const auto dec = variance_decomposition(a, p, cfg);
    const double var_a = rep.deltaA * rep.deltaA;
    const double haa = hermitian_product(xa, xa, cfg).real();
    decomposition.record(std::max(std::abs(dec.delta_perp_sq + dec.sum_plus - var_a),
                                  std::abs(dec.sum_minus - hbar / 2 * haa)),
                         where);
    {
      const auto pure = random_density(pure_spectrum(static_cast<int>(p.dim())), rng, cfg);
      const double d = uncertainty(a, pure, cfg);
      const auto xp = tangent_map(a, pure, cfg);
      pure_equality.record(std::abs(d * d - hbar / 2 * hermitian_product(xp, xp, cfg).real()),
                           [&] { return json{{"point", detail::point_json(pure)}, {"sample", s}}; });
    }

    // Equivariance and gauge invariance of every scalar output
    auto scalars = [&](const OrbitPoint& q, const HermitianOperator& qa, const HermitianOperator& qb) {
      const auto ya = tangent_map(qa, q, cfg), yb = tangent_map(qb, q, cfg);
      const auto h = hermitian_product(ya, yb, cfg);
      return std::vector<double>{symplectic(qa, qb, q, cfg), metric(ya, yb, cfg), h.real(), h.imag(),
                                 geometric_bound(qa, qb, q, cfg), rs_bound(qa, qb, q, cfg),
                                 uncertainty(qa, q, cfg)};
    };
    auto max_diff = [](const std::vector<double>& x, const std::vector<double>& y) {
      double d = 0;
      for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
      return d;
    };
    const auto base = scalars(p, a, b);
    const Matrix u = random_unitary(p.dim(), rng);
    equivariance.record(max_diff(base, scalars(conjugate(p, u, cfg), conjugate(a, u, cfg),
                                               conjugate(b, u, cfg))),
                        where);
    const Matrix wg = random_gauge(p.spectrum().mults, rng);
    gauge.record(max_diff(base, scalars(p.regauged(wg, cfg), a, b)), where);

    // Dynamics
    {
      const double t1 = 0.3, t2 = 0.45;
      const auto traj = trajectory(p, a, 1.0, 5, cfg);
      double drift = 0;
      for (const auto& q : traj.points)
        for (std::size_t j = 0; j < q.spectrum().values.size(); ++j)
          drift = std::max(drift, std::abs(q.spectrum().values[j] - p.spectrum().values[j]));
      spectrum_drift.record(drift, where);
      const auto lhs = evolve(evolve(p, a, t1, cfg), a, t2, cfg);
      const auto rhs = evolve(p, a, t1 + t2, cfg);
      composition.record(detail::max_abs(Matrix(lhs.rho().matrix() - rhs.rho().matrix())), where);
    }

    if (s % fd_every == 0) {
      nijenhuis.record(nijenhuis_fd(a, b, p, cfg), where);
      closedness.record(closedness_check(a, b, inst.c, p, cfg), where);
      ehrenfest.record(ehrenfest_check(a, b, p, cfg), where);
      auto conv = [&](auto&& fn) {
        return detail::ratio_deviation(step_halving(fn, cfg, 1e-3, 1e-5));
      };
      nijenhuis_conv.record(conv([&](const Config& c) { return nijenhuis_fd(a, b, p, c); }), where);
      closedness_conv.record(conv([&](const Config& c) { return closedness_check(a, b, inst.c, p, c); }),
                             where);
      ehrenfest_conv.record(conv([&](const Config& c) { return ehrenfest_check(a, b, p, c); }), where);
    }
  }

  return {j_squared,   lift_roundtrip,  omega_antisym,  metric_sym,    compat,
          h_herm,      im_h,            block_formula,  involutivity,  nondegeneracy,
          nijenhuis,   nijenhuis_conv,  closedness,     closedness_conv, geometric,
          robertson,   decomposition,   pure_equality,  equivariance,  gauge,
          spectrum_drift, composition,  ehrenfest,      ehrenfest_conv};
}

inline json suite_to_json(const std::vector<CheckReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(check_report_to_json(r));
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepOptions {
  std::vector<Matrix> states;  // density matrices, all of one dimension
  std::optional<HermitianOperator> a, b;  // drawn from the seed when absent
  std::uint64_t seed = 0;
  Config cfg;
};

/// Rows of "p1,...,pn,deltaA,deltaB,product,geom_bound,rs_bound"; p1..pn are
/// the eigenvalues of each state with multiplicity, descending.
inline std::string run_sweep(const SweepOptions& opt) {
  if (opt.states.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
  const Index n = opt.states.front().rows();
  Rng rng(opt.seed);
  const auto a = opt.a ? *opt.a : detail::unit_hermitian(n, rng);
  const auto b = opt.b ? *opt.b : detail::unit_hermitian(n, rng);
  detail::require_dim(a.dim(), n, "observable A does not match grid dimension");
  detail::require_dim(b.dim(), n, "observable B does not match grid dimension");
  auto num = [](double x) { return json(x).dump(); };
  std::ostringstream out;
  for (Index i = 0; i < n; ++i) out << 'p' << (i + 1) << ',';
  out << "deltaA,deltaB,product,geom_bound,rs_bound\n";
  for (const auto& m : opt.states) {
    if (m.rows() != n) throw Error(ErrorKind::DimMismatch, "grid states differ in dimension");
    const auto p = orbit_point(make_hermitian(m, opt.cfg), opt.cfg);
    const auto rep = full_report(a, b, p, opt.cfg);
    for (double v : p.spectrum().diagonal()) out << num(v) << ',';
    out << num(rep.deltaA) << ',' << num(rep.deltaB) << ',' << num(rep.product) << ','
        << num(rep.geometric_bound) << ',' << num(rep.rs_bound) << '\n';
  }
  return out.str();
}

/// diag(p, 1 - p) for `count` values of p evenly spaced over [lo, hi].
inline std::vector<Matrix> qubit_grid(double lo, double hi, int count) {
  if (count < 1 || lo > hi || lo < 0.0 || hi > 1.0)
    throw Error(ErrorKind::InvalidArgument, "qubit grid needs 0 <= lo <= hi <= 1 and count >= 1");
  std::vector<Matrix> states;
  for (int i = 0; i < count; ++i) {
    const double p = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = p;
    m(1, 1) = 1.0 - p;
    states.push_back(m);
  }
  return states;
}

}  // namespace orbit_kahler
