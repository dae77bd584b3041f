#pragma once

// The Kaehler triple on an orbit of density operators.
//
//   omega(X_A, X_B) = (1/(i hbar)) Tr([A, B] rho)
//   J (1/(i hbar))[B, rho] = (1/(i hbar))[B_check, rho], where B_check multiplies the
//       upper off-diagonal blocks of B by i and the lower ones by -i
//   g(X, Y) = omega(J X, Y)
//   h(X, Y) = g(X, Y) + i omega(X, Y)
//
// With this sign choice g is positive definite and h is complex-linear in its
// first slot (h(JX, Y) = i h(X, Y)) and conjugate-linear in the second. In
// block form, for off-block-diagonal generators A, B and descending p:
//
//   h(X_A, X_B) = (2/hbar) sum_{i<j} (p_i - p_j) Tr(B_ij^dagger A_ij).

#include <complex>

#include "orbit_kahler/tangent_space.hpp"

namespace orbit_kahler {

template <class Real>
struct BasicKahlerEvaluation {
  Real omega = 0;
  Real metric = 0;
  std::complex<Real> h;
  BasicOrbitPoint<Real> base;
};

using KahlerEvaluation = BasicKahlerEvaluation<double>;

namespace detail {

template <class Real>
void require_off_diagonal(const CMatrix<Real>& frame_coords, const std::vector<Index>& off,
                          const Config& cfg) {
  if (diag_block_max(frame_coords, off) > scaled_tol(cfg.tau_h, frame_coords))
    throw Error(ErrorKind::NotOffDiagonal, "generator has a block-diagonal component");
}

/// Real part of a trace that must be real; rejects large imaginary residue.
template <class Real>
Real checked_real(std::complex<Real> z, Real scale, const Config& cfg, const char* what) {
  if (std::abs(z.imag()) > static_cast<Real>(cfg.tau_check) * std::max(Real(1), scale))
    throw Error(ErrorKind::NonRealResult,
                std::string(what) + " has imaginary part " + std::to_string(double(z.imag())));
  return z.real();
}

}  // namespace detail

/// B -> B_check in the frame of p. B must be off-block-diagonal.
template <class Real>
BasicHermitian<Real> check_generator(const BasicHermitian<Real>& b, const BasicOrbitPoint<Real>& p,
                                     const Config& cfg = {}) {
  detail::require_dim(b.dim(), p.dim(), "operator and point differ in size");
  CMatrix<Real> f = p.to_frame(b.matrix());
  const auto off = p.offsets();
  detail::require_off_diagonal(f, off, cfg);
  const std::complex<Real> i_unit(Real(0), Real(1));
  const int k = p.clusters();
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      auto blk = f.block(off[r], off[c], off[r + 1] - off[r], off[c + 1] - off[c]);
      if (r < c)
        blk *= i_unit;
      else if (r > c)
        blk *= -i_unit;
      else
        blk.setZero();
    }
  return BasicHermitian<Real>::from_trusted(p.from_frame_coords(f));
}

/// The almost complex structure: X -> tangent_map(check_generator(lift(X))).
template <class Real>
BasicTangentVector<Real> apply_complex_structure(const BasicTangentVector<Real>& x,
                                                 const Config& cfg = {}) {
  return tangent_map(check_generator(lift(x, cfg), x.base(), cfg), x.base(), cfg);
}

/// omega(X_A, X_B) = (1/(i hbar)) Tr([A, B] rho).
template <class Real>
Real symplectic(const BasicHermitian<Real>& a, const BasicHermitian<Real>& b,
                const BasicOrbitPoint<Real>& p, const Config& cfg = {}) {
  detail::require_dim(a.dim(), p.dim(), "operator and point differ in size");
  detail::require_dim(b.dim(), p.dim(), "operator and point differ in size");
  const std::complex<Real> tr =
      (detail::commutator(a.matrix(), b.matrix()) * p.rho().matrix()).trace();
  const std::complex<Real> value = tr / std::complex<Real>(Real(0), static_cast<Real>(cfg.hbar));
  return detail::checked_real(value, std::abs(value), cfg, "symplectic form");
}

/// omega on tangent vectors: Tr(lift(X) Y), evaluated antisymmetrically so that
/// omega(X, X) vanishes identically.
template <class Real>
Real symplectic_tangent(const BasicTangentVector<Real>& x, const BasicTangentVector<Real>& y,
                        const Config& cfg = {}) {
  BasicTangentVector<Real>::require_same_base(x, y);
  const std::complex<Real> xy = (lift(x, cfg).matrix() * y.ambient().matrix()).trace();
  const std::complex<Real> yx = (lift(y, cfg).matrix() * x.ambient().matrix()).trace();
  const std::complex<Real> value = (xy - yx) / Real(2);
  return detail::checked_real(value, std::abs(xy) + std::abs(yx), cfg, "symplectic form");
}

/// g(X, Y) = omega(J X, Y); symmetric and positive definite.
template <class Real>
Real metric(const BasicTangentVector<Real>& x, const BasicTangentVector<Real>& y,
            const Config& cfg = {}) {
  BasicTangentVector<Real>::require_same_base(x, y);
  return symplectic_tangent(apply_complex_structure(x, cfg), y, cfg);
}

/// h(X, Y) = g(X, Y) + i omega(X, Y).
template <class Real>
std::complex<Real> hermitian_product(const BasicTangentVector<Real>& x,
                                     const BasicTangentVector<Real>& y, const Config& cfg = {}) {
  return {metric(x, y, cfg), symplectic_tangent(x, y, cfg)};
}

/// Closed-form h(X_A, X_B) from the off-diagonal blocks of A and B.
template <class Real>
std::complex<Real> hermitian_product_blocks(const BasicHermitian<Real>& a,
                                            const BasicHermitian<Real>& b,
                                            const BasicOrbitPoint<Real>& p,
                                            const Config& cfg = {}) {
  detail::require_dim(a.dim(), p.dim(), "operator and point differ in size");
  detail::require_dim(b.dim(), p.dim(), "operator and point differ in size");
  const CMatrix<Real> fa = p.to_frame(a.matrix());
  const CMatrix<Real> fb = p.to_frame(b.matrix());
  const auto off = p.offsets();
  detail::require_off_diagonal(fa, off, cfg);
  detail::require_off_diagonal(fb, off, cfg);
  const auto& vals = p.spectrum().values;
  const int k = p.clusters();
  std::complex<Real> sum(0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const Index ni = off[i + 1] - off[i], nj = off[j + 1] - off[j];
      // Tr(B_ij^dagger A_ij) = sum of conj(B) .* A over the block
      const std::complex<Real> pairing =
          fb.block(off[i], off[j], ni, nj).conjugate().cwiseProduct(fa.block(off[i], off[j], ni, nj)).sum();
      sum += (vals[i] - vals[j]) * pairing;
    }
  return (Real(2) / static_cast<Real>(cfg.hbar)) * sum;
}

/// X_A(rho) = (1/(i hbar)) [A, rho]; same map as tangent_map.
template <class Real>
BasicTangentVector<Real> hamiltonian_vector_field(const BasicHermitian<Real>& a,
                                                  const BasicOrbitPoint<Real>& p,
                                                  const Config& cfg = {}) {
  return tangent_map(a, p, cfg);
}

template <class Real>
BasicKahlerEvaluation<Real> evaluate_kahler(const BasicTangentVector<Real>& x,
                                            const BasicTangentVector<Real>& y,
                                            const Config& cfg = {}) {
  BasicKahlerEvaluation<Real> e;
  e.omega = symplectic_tangent(x, y, cfg);
  e.metric = metric(x, y, cfg);
  e.h = {e.metric, e.omega};
  e.base = x.base();
  return e;
}

}  // namespace orbit_kahler
