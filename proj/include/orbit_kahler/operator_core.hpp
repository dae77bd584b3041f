#pragma once

// Hermitian operators, density spectra, and orbit points carrying an eigenframe.
//
// Every block computation in the library happens in the frame of an OrbitPoint:
// with U the frame, U^dagger rho U = diag(p_1 I_{n_1}, ..., p_k I_{n_k}) with
// p_1 > ... > p_k. Quantities exported to callers never depend on which
// eigenframe was picked inside a degenerate cluster.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "orbit_kahler/config.hpp"

namespace orbit_kahler {

template <class Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
using Matrix = CMatrix<double>;
using Index = Eigen::Index;

using Rng = std::mt19937_64;

namespace detail {

template <class Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.size() == 0) return Real(0);
  return m.cwiseAbs().maxCoeff();
}

template <class Real>
CMatrix<Real> commutator(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  return a * b - b * a;
}

template <class Real>
Real scaled_tol(double tol, const CMatrix<Real>& m) {
  return static_cast<Real>(tol) * std::max(Real(1), max_abs(m));
}

// splitmix64 finalizer; gives independent per-sample streams from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class Real>
CMatrix<Real> ginibre(Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix<Real> z(dim, dim);
  const double s = 1.0 / std::sqrt(2.0);
  for (Index c = 0; c < dim; ++c)
    for (Index r = 0; r < dim; ++r) {
      const double re = normal(rng) * s;
      const double im = normal(rng) * s;
      z(r, c) = std::complex<Real>(static_cast<Real>(re), static_cast<Real>(im));
    }
  return z;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// HermitianOperator

template <class Real>
class BasicHermitian {
 public:
  using real_type = Real;
  using Scalar = std::complex<Real>;
  using MatrixType = CMatrix<Real>;

  BasicHermitian() = default;

  /// Wraps a matrix that is Hermitian up to rounding. The matrix is replaced by
  /// its Hermitian part; only use on results of Hermitian-preserving algebra.
  static BasicHermitian from_trusted(const MatrixType& m) {
    BasicHermitian h;
    h.m_ = (m + m.adjoint()) / Real(2);
    return h;
  }

  /// Stores the matrix verbatim. Used after an explicit hermiticity check.
  static BasicHermitian validated(MatrixType m) { return raw(std::move(m)); }

  static BasicHermitian zero(Index dim) { return from_trusted(MatrixType::Zero(dim, dim)); }
  static BasicHermitian identity(Index dim) {
    return from_trusted(MatrixType::Identity(dim, dim));
  }

  const MatrixType& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

  template <class To>
  BasicHermitian<To> cast() const {
    return BasicHermitian<To>::from_trusted(m_.template cast<std::complex<To>>());
  }

  friend BasicHermitian operator+(const BasicHermitian& a, const BasicHermitian& b) {
    return raw(a.m_ + b.m_);
  }
  friend BasicHermitian operator-(const BasicHermitian& a, const BasicHermitian& b) {
    return raw(a.m_ - b.m_);
  }
  friend BasicHermitian operator-(const BasicHermitian& a) { return raw(-a.m_); }
  friend BasicHermitian operator*(Real s, const BasicHermitian& a) { return raw(s * a.m_); }

 private:
  static BasicHermitian raw(MatrixType m) {
    BasicHermitian h;
    h.m_ = std::move(m);
    return h;
  }

  MatrixType m_;
};

using HermitianOperator = BasicHermitian<double>;

/// Validates a square matrix as Hermitian. No symmetrization is applied to
/// rejected input; accepted input is stored as given.
template <class Real>
BasicHermitian<Real> make_hermitian(const CMatrix<Real>& m, const Config& cfg = {}) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw Error(ErrorKind::DimMismatch, "operator must be a non-empty square matrix");
  const Real asym = detail::max_abs(CMatrix<Real>(m - m.adjoint()));
  if (asym > static_cast<Real>(cfg.tau_h))
    throw Error(ErrorKind::NotHermitian,
                "|M - M^dagger|max = " + std::to_string(static_cast<double>(asym)));
  return BasicHermitian<Real>::validated(m);
}

// ---------------------------------------------------------------------------
// Spectrum

template <class Real>
struct BasicSpectrum {
  std::vector<Real> values;  // strictly descending
  std::vector<int> mults;

  int clusters() const { return static_cast<int>(values.size()); }
  int total_dim() const { return std::accumulate(mults.begin(), mults.end(), 0); }

  /// Start index of each cluster's block, plus a trailing total_dim.
  std::vector<Index> offsets() const {
    std::vector<Index> off(values.size() + 1, 0);
    for (std::size_t j = 0; j < values.size(); ++j) off[j + 1] = off[j] + mults[j];
    return off;
  }

  Real trace() const {
    Real t = 0;
    for (std::size_t j = 0; j < values.size(); ++j) t += static_cast<Real>(mults[j]) * values[j];
    return t;
  }

  /// Smallest separation between consecutive distinct eigenvalues; 0 when k = 1.
  Real min_gap() const {
    Real g = 0;
    for (std::size_t j = 0; j + 1 < values.size(); ++j) {
      const Real d = values[j] - values[j + 1];
      g = (j == 0) ? d : std::min(g, d);
    }
    return g;
  }

  std::vector<Real> diagonal() const {
    std::vector<Real> d;
    for (std::size_t j = 0; j < values.size(); ++j) d.insert(d.end(), mults[j], values[j]);
    return d;
  }

  template <class To>
  BasicSpectrum<To> cast() const {
    BasicSpectrum<To> s;
    for (Real v : values) s.values.push_back(static_cast<To>(v));
    s.mults = mults;
    return s;
  }

  friend bool operator==(const BasicSpectrum&, const BasicSpectrum&) = default;
};

using Spectrum = BasicSpectrum<double>;

/// Checks ordering and the density conditions (p_j >= 0, sum n_j p_j = 1).
template <class Real>
void validate_density_spectrum(const BasicSpectrum<Real>& s, const Config& cfg) {
  if (s.values.empty() || s.values.size() != s.mults.size())
    throw Error(ErrorKind::InvalidArgument, "spectrum needs matching non-empty values/mults");
  for (int n : s.mults)
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "multiplicities must be positive");
  for (std::size_t j = 0; j + 1 < s.values.size(); ++j)
    if (!(s.values[j] - s.values[j + 1] > static_cast<Real>(cfg.tau_c)))
      throw Error(ErrorKind::InvalidArgument, "spectrum values must be strictly descending");
  for (Real v : s.values)
    if (v < -static_cast<Real>(cfg.tau_tr))
      throw Error(ErrorKind::NotDensity, "negative eigenvalue " + std::to_string(double(v)));
  const Real tr = s.trace();
  if (std::abs(tr - Real(1)) > static_cast<Real>(cfg.tau_tr))
    throw Error(ErrorKind::NotDensity, "trace " + std::to_string(double(tr)) + " != 1");
}

// ---------------------------------------------------------------------------
// OrbitPoint

template <class Real>
class BasicOrbitPoint {
 public:
  using MatrixType = CMatrix<Real>;

  BasicOrbitPoint() = default;

  /// Builds rho = U diag(spectrum) U^dagger. The spectrum must be a density
  /// spectrum and U unitary.
  static BasicOrbitPoint from_frame(BasicSpectrum<Real> spectrum, const MatrixType& frame,
                                    const Config& cfg = {}) {
    validate_density_spectrum(spectrum, cfg);
    const Index n = spectrum.total_dim();
    if (frame.rows() != n || frame.cols() != n)
      throw Error(ErrorKind::DimMismatch, "frame size does not match spectrum");
    check_unitary(frame, cfg);
    const auto diag = spectrum.diagonal();
    MatrixType d = MatrixType::Zero(n, n);
    for (Index i = 0; i < n; ++i) d(i, i) = diag[static_cast<std::size_t>(i)];
    auto rho = BasicHermitian<Real>::from_trusted(frame * d * frame.adjoint());
    return BasicOrbitPoint(std::move(rho), std::move(spectrum), frame);
  }

  const BasicHermitian<Real>& rho() const { return data_->rho; }
  const BasicSpectrum<Real>& spectrum() const { return data_->spectrum; }
  const MatrixType& frame() const { return data_->frame; }
  Index dim() const { return data_->rho.dim(); }
  int clusters() const { return data_->spectrum.clusters(); }
  std::vector<Index> offsets() const { return data_->spectrum.offsets(); }

  /// Coordinates of an ambient matrix in this point's eigenframe: U^dagger M U.
  MatrixType to_frame(const MatrixType& m) const { return frame().adjoint() * m * frame(); }
  /// Inverse of to_frame: U M U^dagger.
  MatrixType from_frame_coords(const MatrixType& m) const {
    return frame() * m * frame().adjoint();
  }

  /// True when both handles hold the same density operator; the frame is a
  /// gauge choice and does not enter.
  bool same_point(const BasicOrbitPoint& other) const {
    if (data_ == other.data_) return true;
    if (!data_ || !other.data_) return false;
    return data_->rho.matrix() == other.data_->rho.matrix();
  }

  /// Same rho with frame U W, where W is block-diagonal unitary for this
  /// point's multiplicity pattern (an intra-cluster gauge change).
  BasicOrbitPoint regauged(const MatrixType& block_unitary, const Config& cfg = {}) const {
    check_unitary(block_unitary, cfg);
    const auto off = offsets();
    const Real tol = static_cast<Real>(cfg.tau_u);
    for (int i = 0; i < clusters(); ++i)
      for (int j = 0; j < clusters(); ++j) {
        if (i == j) continue;
        auto blk = block_unitary.block(off[i], off[j], off[i + 1] - off[i], off[j + 1] - off[j]);
        if (blk.size() > 0 && blk.cwiseAbs().maxCoeff() > tol)
          throw Error(ErrorKind::InvalidArgument, "gauge must be block diagonal");
      }
    return BasicOrbitPoint(data_->rho, data_->spectrum, MatrixType(frame() * block_unitary));
  }

  /// The point U rho U^dagger with frame U * frame; spectrum carried over.
  BasicOrbitPoint transported(const MatrixType& unitary) const {
    MatrixType f = unitary * frame();
    auto rho = BasicHermitian<Real>::from_trusted(unitary * data_->rho.matrix() *
                                                  unitary.adjoint());
    return BasicOrbitPoint(std::move(rho), data_->spectrum, std::move(f));
  }

  template <class To>
  BasicOrbitPoint<To> cast() const {
    return BasicOrbitPoint<To>::unchecked(data_->rho.template cast<To>(),
                                          data_->spectrum.template cast<To>(),
                                          data_->frame.template cast<std::complex<To>>());
  }

  /// Assembles a point without validation; callers guarantee the invariants.
  static BasicOrbitPoint unchecked(BasicHermitian<Real> rho, BasicSpectrum<Real> spectrum,
                                   MatrixType frame) {
    return BasicOrbitPoint(std::move(rho), std::move(spectrum), std::move(frame));
  }

  static void check_unitary(const MatrixType& u, const Config& cfg) {
    if (u.rows() != u.cols()) throw Error(ErrorKind::NotUnitary, "unitary must be square");
    const Real dev = detail::max_abs(
        MatrixType(u.adjoint() * u - MatrixType::Identity(u.rows(), u.cols())));
    if (dev > static_cast<Real>(cfg.tau_u))
      throw Error(ErrorKind::NotUnitary, "|U^dagger U - I|max = " + std::to_string(double(dev)));
  }

 private:
  struct Data {
    BasicHermitian<Real> rho;
    BasicSpectrum<Real> spectrum;
    MatrixType frame;
  };

  BasicOrbitPoint(BasicHermitian<Real> rho, BasicSpectrum<Real> spectrum, MatrixType frame)
      : data_(std::make_shared<const Data>(
            Data{std::move(rho), std::move(spectrum), std::move(frame)})) {}

  std::shared_ptr<const Data> data_;
};

using OrbitPoint = BasicOrbitPoint<double>;

/// Eigenvalues of a Hermitian operator clustered into a descending spectrum,
/// with the matching eigenframe. No density checks.
template <class Real>
std::pair<BasicSpectrum<Real>, CMatrix<Real>> cluster_spectrum(const BasicHermitian<Real>& h,
                                                               const Config& cfg) {
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::InvalidArgument, "eigensolver did not converge");
  const Index n = h.dim();
  // Eigen returns ascending order; reverse into descending.
  CMatrix<Real> frame(n, n);
  std::vector<Real> ev(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    ev[static_cast<std::size_t>(i)] = es.eigenvalues()(n - 1 - i);
    frame.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  const Real tol = static_cast<Real>(cfg.tau_c);
  BasicSpectrum<Real> s;
  Real sum = ev[0];
  int count = 1;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const Real gap = ev[i - 1] - ev[i];
    if (gap <= tol) {
      sum += ev[i];
      ++count;
      continue;
    }
    if (gap <= 2 * tol)
      throw Error(ErrorKind::DegenerateGap,
                  "eigenvalue gap " + std::to_string(double(gap)) + " is ambiguous");
    s.values.push_back(sum / static_cast<Real>(count));
    s.mults.push_back(count);
    sum = ev[i];
    count = 1;
  }
  s.values.push_back(sum / static_cast<Real>(count));
  s.mults.push_back(count);
  return {std::move(s), std::move(frame)};
}

/// Diagonalizes rho into an orbit point. Rejects non-density operators and
/// ambiguous clusterings.
template <class Real>
BasicOrbitPoint<Real> orbit_point(const BasicHermitian<Real>& rho, const Config& cfg = {}) {
  auto [s, frame] = cluster_spectrum(rho, cfg);
  for (Real v : s.values)
    if (v < -static_cast<Real>(cfg.tau_tr))
      throw Error(ErrorKind::NotDensity, "negative eigenvalue " + std::to_string(double(v)));
  const Real tr = s.trace();
  if (std::abs(tr - Real(1)) > static_cast<Real>(cfg.tau_tr))
    throw Error(ErrorKind::NotDensity, "trace " + std::to_string(double(tr)) + " != 1");
  for (Real& v : s.values) v = std::max(v, Real(0));
  return BasicOrbitPoint<Real>::unchecked(rho, std::move(s), std::move(frame));
}

/// Adjoint action U A U^dagger.
template <class Real>
BasicHermitian<Real> conjugate(const BasicHermitian<Real>& a, const CMatrix<Real>& u,
                               const Config& cfg = {}) {
  if (u.rows() != a.dim() || u.cols() != a.dim())
    throw Error(ErrorKind::DimMismatch, "unitary and operator sizes differ");
  BasicOrbitPoint<Real>::check_unitary(u, cfg);
  return BasicHermitian<Real>::from_trusted(u * a.matrix() * u.adjoint());
}

/// Adjoint action on an orbit point; the result carries the frame U U_p.
template <class Real>
BasicOrbitPoint<Real> conjugate(const BasicOrbitPoint<Real>& p, const CMatrix<Real>& u,
                                const Config& cfg = {}) {
  if (u.rows() != p.dim() || u.cols() != p.dim())
    throw Error(ErrorKind::DimMismatch, "unitary and point sizes differ");
  BasicOrbitPoint<Real>::check_unitary(u, cfg);
  return p.transported(u);
}

// ---------------------------------------------------------------------------
// Random instances

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
template <class Real = double>
CMatrix<Real> random_unitary(Index dim, Rng& rng) {
  CMatrix<Real> z = detail::ginibre<Real>(dim, rng);
  Eigen::HouseholderQR<CMatrix<Real>> qr(z);
  CMatrix<Real> q = qr.householderQ() * CMatrix<Real>::Identity(dim, dim);
  const CMatrix<Real>& r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const Real mag = std::abs(r(j, j));
    if (mag > Real(0)) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

template <class Real = double>
CMatrix<Real> random_unitary(Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary<Real>(dim, rng);
}

/// Block-diagonal Haar unitary for a multiplicity pattern (an intra-cluster gauge).
template <class Real = double>
CMatrix<Real> random_gauge(const std::vector<int>& mults, Rng& rng) {
  const Index n = std::accumulate(mults.begin(), mults.end(), Index(0));
  CMatrix<Real> w = CMatrix<Real>::Zero(n, n);
  Index off = 0;
  for (int m : mults) {
    w.block(off, off, m, m) = random_unitary<Real>(m, rng);
    off += m;
  }
  return w;
}

/// Gaussian-unitary-ensemble Hermitian matrix.
template <class Real = double>
BasicHermitian<Real> random_hermitian(Index dim, Rng& rng) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dim must be >= 1");
  CMatrix<Real> z = detail::ginibre<Real>(dim, rng);
  return BasicHermitian<Real>::from_trusted(z);
}

template <class Real = double>
BasicHermitian<Real> random_hermitian(Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_hermitian<Real>(dim, rng);
}

/// rho = U diag(spectrum) U^dagger with U Haar-distributed from the seeded stream.
template <class Real = double>
BasicOrbitPoint<Real> random_density(const BasicSpectrum<Real>& spectrum, Rng& rng,
                                     const Config& cfg = {}) {
  validate_density_spectrum(spectrum, cfg);
  return BasicOrbitPoint<Real>::from_frame(spectrum,
                                           random_unitary<Real>(spectrum.total_dim(), rng), cfg);
}

template <class Real = double>
BasicOrbitPoint<Real> random_density(const BasicSpectrum<Real>& spectrum, std::uint64_t seed,
                                     const Config& cfg = {}) {
  Rng rng(seed);
  return random_density<Real>(spectrum, rng, cfg);
}

/// Random density spectrum with the given multiplicities; consecutive distinct
/// values are at least `min_gap` apart before normalization to unit trace.
inline Spectrum random_spectrum(const std::vector<int>& mults, Rng& rng, double min_gap = 0.02) {
  if (mults.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one cluster");
  const std::size_t k = mults.size();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> raw(k);
  for (;;) {
    for (auto& v : raw) v = unif(rng);
    std::sort(raw.begin(), raw.end(), std::greater<>());
    bool ok = true;
    for (std::size_t j = 0; j + 1 < k; ++j) ok = ok && (raw[j] - raw[j + 1] >= min_gap);
    if (ok) break;
  }
  double tr = 0;
  for (std::size_t j = 0; j < k; ++j) tr += mults[j] * raw[j];
  Spectrum s;
  s.mults = mults;
  for (double v : raw) s.values.push_back(v / tr);
  return s;
}

/// Pure-state spectrum {1, 0} with multiplicities (1, dim - 1).
inline Spectrum pure_spectrum(int dim) {
  if (dim == 1) return Spectrum{{1.0}, {1}};
  return Spectrum{{1.0, 0.0}, {1, dim - 1}};
}

// ---------------------------------------------------------------------------
// Unitary flows

/// exp(-i H t / hbar) by Hermitian diagonalization; unitary to rounding.
template <class Real>
CMatrix<Real> flow_unitary(const BasicHermitian<Real>& h, Real t, Real hbar) {
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h.matrix());
  const Index n = h.dim();
  CMatrix<Real> phases = CMatrix<Real>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const Real angle = -es.eigenvalues()(i) * t / hbar;
    phases(i, i) = std::complex<Real>(std::cos(angle), std::sin(angle));
  }
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

}  // namespace orbit_kahler
