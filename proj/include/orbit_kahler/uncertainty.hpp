#pragma once

// Uncertainty functions and the geometric bound
//   dA dB >= (hbar/2) |h(X_A, X_B)|,
// together with the variance split it rests on and the Robertson-Schroedinger
// bound as a comparison baseline.

#include <cmath>
#include <complex>

#include "orbit_kahler/kahler.hpp"

namespace orbit_kahler {

template <class Real>
struct BasicVarianceDecomposition {
  Real delta_perp_sq = 0;  // variance carried by the block-diagonal part
  Real sum_plus = 0;       // sum_{i<j} (p_i + p_j) |A_ij|_F^2
  Real sum_minus = 0;      // sum_{i<j} (p_i - p_j) |A_ij|_F^2
};

using VarianceDecomposition = BasicVarianceDecomposition<double>;

template <class Real>
struct BasicUncertaintyReport {
  Real deltaA = 0;
  Real deltaB = 0;
  Real product = 0;
  Real geometric_bound = 0;
  Real rs_bound = 0;
  Real slack_geometric = 0;
  Real slack_rs = 0;
};

using UncertaintyReport = BasicUncertaintyReport<double>;

/// Tr(rho A).
template <class Real>
Real expectation(const BasicHermitian<Real>& a, const BasicOrbitPoint<Real>& p,
                 const Config& cfg = {}) {
  detail::require_dim(a.dim(), p.dim(), "operator and point differ in size");
  const std::complex<Real> tr = (p.rho().matrix() * a.matrix()).trace();
  return detail::checked_real(tr, std::abs(tr), cfg, "expectation");
}

/// sqrt(Tr(rho A^2) - Tr(rho A)^2); radicands in [-tau_check, 0) clamp to 0.
template <class Real>
Real uncertainty(const BasicHermitian<Real>& a, const BasicOrbitPoint<Real>& p,
                 const Config& cfg = {}) {
  const Real mean = expectation(a, p, cfg);
  const std::complex<Real> second_c = (p.rho().matrix() * a.matrix() * a.matrix()).trace();
  const Real second = detail::checked_real(second_c, std::abs(second_c), cfg, "second moment");
  const Real var = second - mean * mean;
  if (var < -static_cast<Real>(cfg.tau_check) * std::max(Real(1), second))
    throw Error(ErrorKind::NegativeVariance, "variance " + std::to_string(double(var)));
  return std::sqrt(std::max(var, Real(0)));
}

/// Block split of the variance of A at p:
///   dA^2 = delta_perp_sq + sum_plus,   sum_minus = (hbar/2) h(X_A, X_A).
template <class Real>
BasicVarianceDecomposition<Real> variance_decomposition(const BasicHermitian<Real>& a,
                                                        const BasicOrbitPoint<Real>& p,
                                                        const Config& /*cfg*/ = {}) {
  const auto d = blocks(a, p);
  const auto& vals = p.spectrum().values;
  const int k = p.clusters();
  BasicVarianceDecomposition<Real> out;
  Real weighted_sq = 0, weighted_tr = 0;
  for (int i = 0; i < k; ++i) {
    const auto& aii = d.diag_blocks[static_cast<std::size_t>(i)];
    // Tr(A_ii^2) for Hermitian A_ii is its squared Frobenius norm.
    weighted_sq += vals[i] * aii.squaredNorm();
    weighted_tr += vals[i] * aii.trace().real();
  }
  out.delta_perp_sq = weighted_sq - weighted_tr * weighted_tr;
  for (const auto& [ij, blk] : d.upper_blocks) {
    const Real norm_sq = blk.squaredNorm();
    out.sum_plus += (vals[ij.first] + vals[ij.second]) * norm_sq;
    out.sum_minus += (vals[ij.first] - vals[ij.second]) * norm_sq;
  }
  return out;
}

/// (hbar/2) |h(X_A, X_B)|.
template <class Real>
Real geometric_bound(const BasicHermitian<Real>& a, const BasicHermitian<Real>& b,
                     const BasicOrbitPoint<Real>& p, const Config& cfg = {}) {
  const auto xa = hamiltonian_vector_field(a, p, cfg);
  const auto xb = hamiltonian_vector_field(b, p, cfg);
  return static_cast<Real>(cfg.hbar) / Real(2) * std::abs(hermitian_product(xa, xb, cfg));
}

/// Robertson-Schroedinger bound
///   sqrt( (<{A,B}>/2 - <A><B>)^2 + (<[A,B]>/(2i))^2 ).
template <class Real>
Real rs_bound(const BasicHermitian<Real>& a, const BasicHermitian<Real>& b,
              const BasicOrbitPoint<Real>& p, const Config& cfg = {}) {
  detail::require_dim(a.dim(), p.dim(), "operator and point differ in size");
  detail::require_dim(b.dim(), p.dim(), "operator and point differ in size");
  const auto& rho = p.rho().matrix();
  const CMatrix<Real> ab = a.matrix() * b.matrix();
  const CMatrix<Real> ba = b.matrix() * a.matrix();
  const std::complex<Real> anti = (rho * (ab + ba)).trace() / Real(2);
  const std::complex<Real> comm = (rho * (ab - ba)).trace() / std::complex<Real>(0, 2);
  const Real cov = detail::checked_real(anti, std::abs(anti), cfg, "anticommutator") -
                   expectation(a, p, cfg) * expectation(b, p, cfg);
  const Real c = detail::checked_real(comm, std::abs(comm), cfg, "commutator");
  return std::sqrt(cov * cov + c * c);
}

template <class Real>
BasicUncertaintyReport<Real> full_report(const BasicHermitian<Real>& a,
                                         const BasicHermitian<Real>& b,
                                         const BasicOrbitPoint<Real>& p, const Config& cfg = {}) {
  BasicUncertaintyReport<Real> r;
  r.deltaA = uncertainty(a, p, cfg);
  r.deltaB = uncertainty(b, p, cfg);
  r.product = r.deltaA * r.deltaB;
  r.geometric_bound = geometric_bound(a, b, p, cfg);
  r.rs_bound = rs_bound(a, b, p, cfg);
  r.slack_geometric = r.product - r.geometric_bound;
  r.slack_rs = r.product - r.rs_bound;
  return r;
}

}  // namespace orbit_kahler
