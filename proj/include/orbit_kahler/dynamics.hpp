#pragma once

// Unitary flows rho(t) = exp(-iHt/hbar) rho exp(iHt/hbar) on the orbit.

#include <vector>

#include "orbit_kahler/kahler.hpp"

namespace orbit_kahler {

template <class Real>
struct BasicTrajectory {
  std::vector<Real> times;
  std::vector<BasicOrbitPoint<Real>> points;
  BasicHermitian<Real> generator;
};

using Trajectory = BasicTrajectory<double>;

namespace detail {

/// Throws DegenerateDrift unless `moved` has the same cluster pattern as
/// `reference` with every value within tau_c.
template <class Real>
void require_same_spectrum(const BasicSpectrum<Real>& reference, const BasicSpectrum<Real>& moved,
                           const Config& cfg) {
  bool same = reference.mults == moved.mults;
  for (std::size_t j = 0; same && j < reference.values.size(); ++j)
    same = std::abs(reference.values[j] - moved.values[j]) <= static_cast<Real>(cfg.tau_c);
  if (!same) throw Error(ErrorKind::DegenerateDrift, "flow changed the eigenvalue clusters");
}

/// Point reached by following the flow of `generator` for time t. The frame is
/// transported (U * frame) rather than recomputed; the spectrum is re-derived
/// from scratch and compared against the starting one.
template <class Real>
BasicOrbitPoint<Real> flowed_point(const BasicOrbitPoint<Real>& p,
                                   const BasicHermitian<Real>& generator, Real t,
                                   const Config& cfg) {
  auto q = p.transported(flow_unitary(generator, t, static_cast<Real>(cfg.hbar)));
  auto [s, frame] = cluster_spectrum(q.rho(), cfg);
  require_same_spectrum(p.spectrum(), s, cfg);
  return q;
}

}  // namespace detail

/// Moves p along the flow of H for time t and re-diagonalizes the result.
template <class Real>
BasicOrbitPoint<Real> evolve(const BasicOrbitPoint<Real>& p, const BasicHermitian<Real>& h, Real t,
                             const Config& cfg = {}) {
  detail::require_dim(h.dim(), p.dim(), "generator and point differ in size");
  if (t == Real(0)) return p;
  const CMatrix<Real> u = flow_unitary(h, t, static_cast<Real>(cfg.hbar));
  auto rho = BasicHermitian<Real>::from_trusted(u * p.rho().matrix() * u.adjoint());
  auto q = orbit_point(rho, cfg);
  detail::require_same_spectrum(p.spectrum(), q.spectrum(), cfg);
  return q;
}

/// |d/dt Tr(rho(t) A) at t = 0 - omega(X_A, X_H)|, with the derivative taken
/// by a central difference of step cfg.fd_step. Evaluated in extended precision.
template <class Real>
Real ehrenfest_check(const BasicHermitian<Real>& a, const BasicHermitian<Real>& h,
                     const BasicOrbitPoint<Real>& p, const Config& cfg = {}) {
  using W = long double;
  detail::require_dim(a.dim(), p.dim(), "observable and point differ in size");
  detail::require_dim(h.dim(), p.dim(), "generator and point differ in size");
  const auto pw = p.template cast<W>();
  const auto aw = a.template cast<W>();
  const auto hw = h.template cast<W>();
  const W step = static_cast<W>(cfg.fd_step);
  const W hbar = static_cast<W>(cfg.hbar);
  auto value = [&](W t) {
    const CMatrix<W> u = flow_unitary(hw, t, hbar);
    return (u * pw.rho().matrix() * u.adjoint() * aw.matrix()).trace().real();
  };
  const W derivative = (value(step) - value(-step)) / (2 * step);
  return static_cast<Real>(std::abs(derivative - symplectic(aw, hw, pw, cfg)));
}

/// `steps` samples of the flow at uniform times in [0, t_max]; steps == 1
/// yields the initial point alone.
template <class Real>
BasicTrajectory<Real> trajectory(const BasicOrbitPoint<Real>& p, const BasicHermitian<Real>& h,
                                 Real t_max, int steps, const Config& cfg = {}) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
  detail::require_dim(h.dim(), p.dim(), "generator and point differ in size");
  BasicTrajectory<Real> tr;
  tr.generator = h;
  for (int i = 0; i < steps; ++i) {
    const Real t = steps == 1 ? Real(0) : t_max * static_cast<Real>(i) / static_cast<Real>(steps - 1);
    tr.times.push_back(t);
    tr.points.push_back(i == 0 ? p : evolve(p, h, t, cfg));
  }
  return tr;
}

}  // namespace orbit_kahler
