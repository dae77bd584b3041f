#pragma once

// Checks that J is integrable and that omega is closed and non-degenerate.
//
// Two independent routes to integrability:
//  * involutivity_check: the +i eigenspace of J (complexified) at rho is the set
//    of strictly upper-block-triangular matrices in the eigenframe. Integrable
//    means that set is closed under commutators.
//  * nijenhuis_fd: N^J(X, Y) = [X,Y] + J[JX,Y] + J[X,JY] - [JX,JY] evaluated on
//    vector fields around rho, with Lie brackets from central differences along
//    unitary flows.
//
// Finite differences are evaluated in long double so the O(step^2) truncation
// error stays above rounding noise down to steps of ~1e-5.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "orbit_kahler/dynamics.hpp"
#include "orbit_kahler/io.hpp"

namespace orbit_kahler {

struct CheckReport {
  std::string check_name;
  double max_residual = 0;
  int samples = 0;
  double tolerance = 0;
  bool passed = true;
  json worst_case = json::object();

  /// Folds one sample into the report; keeps the instance with the largest residual.
  void record(double residual, const std::function<json()>& instance) {
    if (samples == 0 || residual > max_residual || std::isnan(residual)) {
      max_residual = residual;
      worst_case = instance();
    }
    ++samples;
    passed = max_residual <= tolerance;
  }
};

inline json check_report_to_json(const CheckReport& r) {
  return json{{"check", r.check_name},     {"max_residual", r.max_residual},
              {"samples", r.samples},      {"tolerance", r.tolerance},
              {"passed", r.passed},        {"worst_case", r.worst_case}};
}

namespace detail {

using Wide = long double;
using WPoint = BasicOrbitPoint<Wide>;
using WHerm = BasicHermitian<Wide>;
using WTangent = BasicTangentVector<Wide>;

/// A vector field on the orbit, returned as its ambient matrix at each point.
using Field = std::function<CMatrix<Wide>(const WPoint&)>;

inline Field fundamental_field(const WHerm& a, const Config& cfg) {
  return [a, cfg](const WPoint& q) { return tangent_map(a, q, cfg).ambient().matrix(); };
}

inline Field rotated_field(const WHerm& a, const Config& cfg) {
  return [a, cfg](const WPoint& q) {
    return apply_complex_structure(tangent_map(a, q, cfg), cfg).ambient().matrix();
  };
}

/// Extended-precision copy of p, re-orthonormalized in long double so that
/// rho = U diag(spectrum) U^dagger holds to long-double rounding.
template <class Real>
WPoint widen(const BasicOrbitPoint<Real>& p) {
  const CMatrix<Wide> u = p.frame().template cast<std::complex<Wide>>();
  Eigen::HouseholderQR<CMatrix<Wide>> qr(u);
  CMatrix<Wide> q = qr.householderQ() * CMatrix<Wide>::Identity(u.rows(), u.cols());
  const CMatrix<Wide>& r = qr.matrixQR();
  for (Index j = 0; j < u.cols(); ++j) {
    const Wide mag = std::abs(r(j, j));
    if (mag > Wide(0)) q.col(j) *= r(j, j) / mag;
  }
  auto spectrum = p.spectrum().template cast<Wide>();
  const auto diag = spectrum.diagonal();
  CMatrix<Wide> d = CMatrix<Wide>::Zero(u.rows(), u.cols());
  for (Index i = 0; i < u.rows(); ++i) d(i, i) = diag[static_cast<std::size_t>(i)];
  auto rho = WHerm::from_trusted(q * d * q.adjoint());
  return WPoint::unchecked(std::move(rho), std::move(spectrum), std::move(q));
}

inline WTangent as_tangent(const WPoint& p, const CMatrix<Wide>& m) {
  return WTangent::unchecked(p, WHerm::from_trusted(m));
}

/// Central difference of `value` along the flow whose velocity at p is `v`.
template <class T, class F>
T along(const WPoint& p, const CMatrix<Wide>& v, F&& value, const Config& cfg) {
  const WHerm gen = lift(as_tangent(p, v), cfg);
  const Wide h = static_cast<Wide>(cfg.fd_step);
  const T plus = value(flowed_point(p, gen, h, cfg));
  const T minus = value(flowed_point(p, gen, -h, cfg));
  return (plus - minus) / (2 * h);
}

/// Lie bracket [V, W](p) = D W[V(p)] - D V[W(p)].
inline CMatrix<Wide> bracket(const Field& v, const Field& w, const WPoint& p, const Config& cfg) {
  const CMatrix<Wide> dw = along<CMatrix<Wide>>(p, v(p), w, cfg);
  const CMatrix<Wide> dv = along<CMatrix<Wide>>(p, w(p), v, cfg);
  return dw - dv;
}

inline CMatrix<Wide> apply_j_at(const WPoint& p, const CMatrix<Wide>& m, const Config& cfg) {
  return apply_complex_structure(as_tangent(p, m), cfg).ambient().matrix();
}

}  // namespace detail

/// Random strictly upper-block matrices P, Q (unit Frobenius norm) are built in
/// the frame of p, commuted in ambient coordinates, and mapped back; the residual
/// is the largest entry of [P, Q] outside the strictly upper blocks.
inline CheckReport involutivity_check(const OrbitPoint& p, int samples, std::uint64_t seed,
                                      const Config& /*cfg*/ = {}) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be >= 1");
  CheckReport report{"involutivity", 0, 0, 1e-12, true, json::object()};
  const auto off = p.offsets();
  const int k = p.clusters();
  const Index n = p.dim();
  auto strictly_upper = [&](Rng& rng) {
    Matrix g = detail::ginibre<double>(n, rng);
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        const Index ni = off[i + 1] - off[i], nj = off[j + 1] - off[j];
        m.block(off[i], off[j], ni, nj) = g.block(off[i], off[j], ni, nj);
      }
    const double norm = m.norm();
    return norm > 0 ? Matrix(m / norm) : m;
  };
  for (int s = 0; s < samples; ++s) {
    Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(s)));
    const Matrix pf = strictly_upper(rng), qf = strictly_upper(rng);
    const Matrix c = p.to_frame(detail::commutator(p.from_frame_coords(pf), p.from_frame_coords(qf)));
    double residual = 0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j <= i; ++j) {
        const Index ni = off[i + 1] - off[i], nj = off[j + 1] - off[j];
        residual = std::max(residual, detail::max_abs(c.block(off[i], off[j], ni, nj)));
      }
    report.record(residual, [&] {
      return json{{"rho", matrix_to_json(p.rho().matrix())},
                  {"P_frame", matrix_to_json(pf)},
                  {"Q_frame", matrix_to_json(qf)}};
    });
  }
  return report;
}

/// max |N^J(X_A, X_B)| at p, with X_A, X_B the fundamental fields of A and B and
/// JX_A extended pointwise. Converges to 0 as O(fd_step^2).
template <class Real>
Real nijenhuis_fd(const BasicHermitian<Real>& a, const BasicHermitian<Real>& b,
                  const BasicOrbitPoint<Real>& p, const Config& cfg = {}) {
  detail::require_dim(a.dim(), p.dim(), "operator and point differ in size");
  detail::require_dim(b.dim(), p.dim(), "operator and point differ in size");
  using detail::Wide;
  const auto pw = detail::widen(p);
  const auto x = detail::fundamental_field(a.template cast<Wide>(), cfg);
  const auto y = detail::fundamental_field(b.template cast<Wide>(), cfg);
  const auto jx = detail::rotated_field(a.template cast<Wide>(), cfg);
  const auto jy = detail::rotated_field(b.template cast<Wide>(), cfg);
  const CMatrix<Wide> n = detail::bracket(x, y, pw, cfg) +
                          detail::apply_j_at(pw, detail::bracket(jx, y, pw, cfg), cfg) +
                          detail::apply_j_at(pw, detail::bracket(x, jy, pw, cfg), cfg) -
                          detail::bracket(jx, jy, pw, cfg);
  return static_cast<Real>(detail::max_abs(n));
}

/// |d omega(X_A, X_B, X_C)| on fundamental fields:
///   (1/3) ( X_A omega(X_B,X_C) - X_B omega(X_A,X_C) + X_C omega(X_A,X_B)
///           + omega([X_A,X_B],X_C) + omega([X_B,X_C],X_A) + omega([X_C,X_A],X_B) ).
/// Directional derivatives and brackets are central differences along unitary flows.
template <class Real>
Real closedness_check(const BasicHermitian<Real>& a, const BasicHermitian<Real>& b,
                      const BasicHermitian<Real>& c, const BasicOrbitPoint<Real>& p,
                      const Config& cfg = {}) {
  detail::require_dim(a.dim(), p.dim(), "operator and point differ in size");
  detail::require_dim(b.dim(), p.dim(), "operator and point differ in size");
  detail::require_dim(c.dim(), p.dim(), "operator and point differ in size");
  using detail::Wide;
  const auto pw = detail::widen(p);
  const auto xa = detail::fundamental_field(a.template cast<Wide>(), cfg);
  const auto xb = detail::fundamental_field(b.template cast<Wide>(), cfg);
  const auto xc = detail::fundamental_field(c.template cast<Wide>(), cfg);

  auto omega_of = [&cfg](const detail::Field& v, const detail::Field& w) {
    return [&cfg, v, w](const detail::WPoint& q) {
      return symplectic_tangent(detail::as_tangent(q, v(q)), detail::as_tangent(q, w(q)), cfg);
    };
  };
  auto derivative = [&](const detail::Field& dir, const detail::Field& v, const detail::Field& w) {
    return detail::along<Wide>(pw, dir(pw), omega_of(v, w), cfg);
  };
  auto omega_at_p = [&](const CMatrix<Wide>& u, const detail::Field& w) {
    return symplectic_tangent(detail::as_tangent(pw, u), detail::as_tangent(pw, w(pw)), cfg);
  };

  const Wide derivs = derivative(xa, xb, xc) - derivative(xb, xa, xc) + derivative(xc, xa, xb);
  const Wide brackets = omega_at_p(detail::bracket(xa, xb, pw, cfg), xc) +
                        omega_at_p(detail::bracket(xb, xc, pw, cfg), xa) +
                        omega_at_p(detail::bracket(xc, xa, pw, cfg), xb);
  return static_cast<Real>(std::abs((derivs + brackets) / 3));
}

/// For random tangent X at p, |omega(X, JX)| = g(X, X) must dominate
/// (min_gap / hbar) |lift(X)|_F^2. The residual is the relative shortfall below
/// that floor (0 when the floor holds); the worst case records the smallest witness.
inline CheckReport nondegeneracy_check(const OrbitPoint& p, int samples, std::uint64_t seed,
                                       const Config& cfg = {}) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be >= 1");
  CheckReport report{"nondegeneracy", 0, 0, cfg.tau_check, true, json::object()};
  const double gap = p.spectrum().min_gap();
  double smallest_ratio = std::numeric_limits<double>::infinity();
  json smallest = json::object();
  for (int s = 0; s < samples; ++s) {
    Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(s)));
    const auto h = random_hermitian(p.dim(), rng);
    const auto x = tangent_map(h, p, cfg);
    const double lifted = lift(x, cfg).matrix().squaredNorm();
    if (p.clusters() == 1 || lifted == 0.0) {
      // no nonzero tangent vectors on a single-point orbit
      report.record(0.0, [] { return json::object(); });
      continue;
    }
    const double witness = std::abs(symplectic_tangent(x, apply_complex_structure(x, cfg), cfg));
    const double floor = gap / cfg.hbar * lifted;
    const double ratio = witness / floor;
    const double residual = std::max(0.0, 1.0 - ratio);
    auto instance = [&] {
      return json{{"rho", matrix_to_json(p.rho().matrix())},
                  {"X", matrix_to_json(x.ambient().matrix())},
                  {"witness", witness},
                  {"floor", floor},
                  {"ratio", ratio}};
    };
    if (ratio < smallest_ratio) {
      smallest_ratio = ratio;
      smallest = instance();
    }
    report.record(residual, instance);
  }
  if (std::isfinite(smallest_ratio)) report.worst_case = smallest;
  return report;
}

/// Residuals of a finite-difference check at steps h0, h0/2, ... and the ratios
/// of consecutive residuals (4 for a clean second-order method).
struct StepHalving {
  std::vector<double> steps;
  std::vector<double> residuals;
  std::vector<double> ratios;
};

inline StepHalving step_halving(const std::function<double(const Config&)>& residual_at,
                                Config cfg, double h0, double h_min) {
  StepHalving out;
  for (double h = h0; h >= h_min * (1 - 1e-9); h /= 2) {
    cfg.fd_step = h;
    out.steps.push_back(h);
    out.residuals.push_back(residual_at(cfg));
    if (out.residuals.size() > 1)
      out.ratios.push_back(out.residuals[out.residuals.size() - 2] / out.residuals.back());
  }
  return out;
}

}  // namespace orbit_kahler
