#pragma once

// Tangent vectors to the orbit through rho.
//
// tangent_map sends H to (1/(i hbar)) [H, rho]. In the eigenframe its (i,j) block
// is (p_j - p_i)/(i hbar) * H_ij, so the kernel is the block-diagonal operators
// and the map is invertible on the off-block-diagonal ones. lift() is that inverse.

#include <map>
#include <utility>
#include <vector>

#include "orbit_kahler/operator_core.hpp"

namespace orbit_kahler {

namespace detail {

inline void require_dim(Index a, Index b, const char* what) {
  if (a != b) throw Error(ErrorKind::DimMismatch, what);
}

/// Largest entry of the diagonal blocks of a frame-coordinate matrix.
template <class Real>
Real diag_block_max(const CMatrix<Real>& m, const std::vector<Index>& off) {
  Real r = 0;
  for (std::size_t j = 0; j + 1 < off.size(); ++j) {
    const Index n = off[j + 1] - off[j];
    r = std::max(r, max_abs(m.block(off[j], off[j], n, n)));
  }
  return r;
}

/// Keeps either the diagonal blocks (keep_diag) or the off-diagonal blocks.
template <class Real>
CMatrix<Real> mask_blocks(const CMatrix<Real>& m, const std::vector<Index>& off, bool keep_diag) {
  CMatrix<Real> out = keep_diag ? CMatrix<Real>::Zero(m.rows(), m.cols()) : m;
  for (std::size_t j = 0; j + 1 < off.size(); ++j) {
    const Index n = off[j + 1] - off[j];
    if (keep_diag)
      out.block(off[j], off[j], n, n) = m.block(off[j], off[j], n, n);
    else
      out.block(off[j], off[j], n, n).setZero();
  }
  return out;
}

}  // namespace detail

template <class Real>
class BasicTangentVector {
 public:
  BasicTangentVector() = default;

  /// Validating constructor: ambient must be Hermitian with vanishing diagonal
  /// blocks in the frame of `base`.
  static BasicTangentVector make(const BasicOrbitPoint<Real>& base,
                                 const BasicHermitian<Real>& ambient, const Config& cfg = {}) {
    detail::require_dim(base.dim(), ambient.dim(), "tangent vector and base differ in size");
    const CMatrix<Real> f = base.to_frame(ambient.matrix());
    if (detail::diag_block_max(f, base.offsets()) > detail::scaled_tol(cfg.tau_h, f))
      throw Error(ErrorKind::NotOffDiagonal, "tangent vector has block-diagonal component");
    return BasicTangentVector(base, ambient);
  }

  static BasicTangentVector unchecked(BasicOrbitPoint<Real> base, BasicHermitian<Real> ambient) {
    return BasicTangentVector(std::move(base), std::move(ambient));
  }

  const BasicOrbitPoint<Real>& base() const { return base_; }
  const BasicHermitian<Real>& ambient() const { return ambient_; }
  Index dim() const { return ambient_.dim(); }

  friend BasicTangentVector operator+(const BasicTangentVector& a, const BasicTangentVector& b) {
    require_same_base(a, b);
    return BasicTangentVector(a.base_, a.ambient_ + b.ambient_);
  }
  friend BasicTangentVector operator-(const BasicTangentVector& a, const BasicTangentVector& b) {
    require_same_base(a, b);
    return BasicTangentVector(a.base_, a.ambient_ - b.ambient_);
  }
  friend BasicTangentVector operator-(const BasicTangentVector& a) {
    return BasicTangentVector(a.base_, -a.ambient_);
  }
  friend BasicTangentVector operator*(Real s, const BasicTangentVector& a) {
    return BasicTangentVector(a.base_, s * a.ambient_);
  }

  static void require_same_base(const BasicTangentVector& a, const BasicTangentVector& b) {
    if (!a.base_.same_point(b.base_))
      throw Error(ErrorKind::BaseMismatch, "tangent vectors live at different points");
  }

 private:
  BasicTangentVector(BasicOrbitPoint<Real> base, BasicHermitian<Real> ambient)
      : base_(std::move(base)), ambient_(std::move(ambient)) {}

  BasicOrbitPoint<Real> base_;
  BasicHermitian<Real> ambient_;
};

using TangentVector = BasicTangentVector<double>;

/// An operator written in the eigenframe of a point and cut along its
/// multiplicity pattern. Lower blocks are the adjoints of upper ones.
template <class Real>
struct BasicBlockDecomposition {
  BasicOrbitPoint<Real> base;
  std::vector<CMatrix<Real>> diag_blocks;
  std::map<std::pair<int, int>, CMatrix<Real>> upper_blocks;

  /// Frame-coordinate matrix rebuilt from the blocks.
  CMatrix<Real> frame_matrix() const {
    const auto off = base.offsets();
    const Index n = base.dim();
    CMatrix<Real> m = CMatrix<Real>::Zero(n, n);
    for (std::size_t j = 0; j < diag_blocks.size(); ++j)
      m.block(off[j], off[j], off[j + 1] - off[j], off[j + 1] - off[j]) = diag_blocks[j];
    for (const auto& [ij, blk] : upper_blocks) {
      const auto [i, j] = ij;
      m.block(off[i], off[j], blk.rows(), blk.cols()) = blk;
      m.block(off[j], off[i], blk.cols(), blk.rows()) = blk.adjoint();
    }
    return m;
  }

  /// The operator back in ambient coordinates.
  BasicHermitian<Real> reassemble() const {
    return BasicHermitian<Real>::from_trusted(base.from_frame_coords(frame_matrix()));
  }
};

using BlockDecomposition = BasicBlockDecomposition<double>;

/// H -> (1/(i hbar)) [H, rho]: the surjection onto the tangent space at p.
template <class Real>
BasicTangentVector<Real> tangent_map(const BasicHermitian<Real>& h, const BasicOrbitPoint<Real>& p,
                                     const Config& cfg = {}) {
  detail::require_dim(h.dim(), p.dim(), "operator and point differ in size");
  const std::complex<Real> scale(Real(0), -Real(1) / static_cast<Real>(cfg.hbar));
  CMatrix<Real> x = scale * detail::commutator(h.matrix(), p.rho().matrix());
  return BasicTangentVector<Real>::unchecked(p, BasicHermitian<Real>::from_trusted(x));
}

/// Splits H into its block-diagonal part (kernel of tangent_map) and its
/// off-block-diagonal part (the complement), both relative to p's frame.
template <class Real>
std::pair<BasicHermitian<Real>, BasicHermitian<Real>> split_kernel(const BasicHermitian<Real>& h,
                                                                   const BasicOrbitPoint<Real>& p) {
  detail::require_dim(h.dim(), p.dim(), "operator and point differ in size");
  const CMatrix<Real> f = p.to_frame(h.matrix());
  const auto off = p.offsets();
  auto kernel =
      BasicHermitian<Real>::from_trusted(p.from_frame_coords(detail::mask_blocks(f, off, true)));
  auto complement =
      BasicHermitian<Real>::from_trusted(p.from_frame_coords(detail::mask_blocks(f, off, false)));
  return {std::move(kernel), std::move(complement)};
}

template <class Real>
BasicBlockDecomposition<Real> blocks(const BasicHermitian<Real>& h, const BasicOrbitPoint<Real>& p) {
  detail::require_dim(h.dim(), p.dim(), "operator and point differ in size");
  const CMatrix<Real> f = p.to_frame(h.matrix());
  const auto off = p.offsets();
  const int k = p.clusters();
  BasicBlockDecomposition<Real> d{p, {}, {}};
  for (int i = 0; i < k; ++i) {
    const Index ni = off[i + 1] - off[i];
    d.diag_blocks.push_back(f.block(off[i], off[i], ni, ni));
    for (int j = i + 1; j < k; ++j)
      d.upper_blocks.emplace(std::pair{i, j}, f.block(off[i], off[j], ni, off[j + 1] - off[j]));
  }
  return d;
}

/// Inverse of tangent_map on the off-block-diagonal operators:
/// B_ij = i hbar X_ij / (p_j - p_i) in the frame of X's base.
template <class Real>
BasicHermitian<Real> lift(const BasicTangentVector<Real>& x, const Config& cfg = {}) {
  const auto& p = x.base();
  const CMatrix<Real> f = p.to_frame(x.ambient().matrix());
  const auto off = p.offsets();
  const auto& vals = p.spectrum().values;
  const int k = p.clusters();
  const Real hbar = static_cast<Real>(cfg.hbar);
  CMatrix<Real> b = CMatrix<Real>::Zero(p.dim(), p.dim());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::complex<Real> c(Real(0), hbar / (vals[j] - vals[i]));
      const Index ni = off[i + 1] - off[i], nj = off[j + 1] - off[j];
      b.block(off[i], off[j], ni, nj) = c * f.block(off[i], off[j], ni, nj);
    }
  return BasicHermitian<Real>::from_trusted(p.from_frame_coords(b));
}

}  // namespace orbit_kahler
