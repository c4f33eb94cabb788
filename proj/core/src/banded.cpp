#include "chfem/banded.hpp"

#include <algorithm>
#include <cmath>

#include "chfem/errors.hpp"

namespace chfem {

template <class Real>
BandedSystemT<Real>::BandedSystemT(int dim, int halfband, bool cyclic)
    : n_(dim), p_(halfband), m_(dim - halfband), cyclic_(cyclic) {
  if (dim <= 0 || halfband < 0 || halfband > 15) throw Error("BandedSystem: bad dimensions");
  if (cyclic && dim < 2 * halfband + 2)
    throw Error("BandedSystem: cyclic system too small for its bandwidth");
  band_.assign(static_cast<size_t>(n_) * band_cols(), Real(0));
  if (cyclic_) {
    tr_.assign(static_cast<size_t>(p_) * p_, Real(0));
    bl_.assign(static_cast<size_t>(p_) * p_, Real(0));
  }
}

template <class Real>
void BandedSystemT<Real>::add(int i, int j, Real v) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_) throw Error("BandedSystem::add: index out of range");
  const int d = j - i;
  if (std::abs(d) <= p_) {
    band_[static_cast<size_t>(i) * band_cols() + d + p_] += v;
    return;
  }
  if (cyclic_ && i < p_ && j >= n_ - p_) {
    tr_[static_cast<size_t>(i) * p_ + (j - (n_ - p_))] += v;
    return;
  }
  if (cyclic_ && i >= n_ - p_ && j < p_) {
    bl_[static_cast<size_t>(i - (n_ - p_)) * p_ + j] += v;
    return;
  }
  throw Error("BandedSystem::add: entry outside the banded/cyclic pattern");
}

template <class Real>
Real BandedSystemT<Real>::entry(int i, int j) const {
  const int d = j - i;
  if (std::abs(d) <= p_) return band_[static_cast<size_t>(i) * band_cols() + d + p_];
  if (cyclic_ && i < p_ && j >= n_ - p_) return tr_[static_cast<size_t>(i) * p_ + (j - (n_ - p_))];
  if (cyclic_ && i >= n_ - p_ && j < p_) return bl_[static_cast<size_t>(i - (n_ - p_)) * p_ + j];
  return Real(0);
}

namespace {

// In-place LU without pivoting on banded storage rows [0, rows) x (2p+1).
// Returns false on a zero/non-finite pivot; tracks pivot signs.
template <class Real>
bool banded_lu(std::vector<Real>& a, int rows, int p, bool& positive) {
  const int cols = 2 * p + 1;
  positive = true;
  for (int k = 0; k < rows; ++k) {
    const Real piv = a[static_cast<size_t>(k) * cols + p];
    if (!(std::isfinite(static_cast<double>(piv))) || piv == Real(0)) return false;
    if (piv <= Real(0)) positive = false;
    const int imax = std::min(rows - 1, k + p);
    for (int i = k + 1; i <= imax; ++i) {
      Real& lik = a[static_cast<size_t>(i) * cols + (k - i) + p];
      if (lik == Real(0)) continue;
      lik /= piv;
      for (int j = k + 1; j <= imax; ++j)
        a[static_cast<size_t>(i) * cols + (j - i) + p] -=
            lik * a[static_cast<size_t>(k) * cols + (j - k) + p];
    }
  }
  return true;
}

template <class Real>
void banded_lu_solve(const std::vector<Real>& a, int rows, int p, Real* b) {
  const int cols = 2 * p + 1;
  for (int i = 0; i < rows; ++i) {
    Real s = b[i];
    const int k0 = std::max(0, i - p);
    for (int k = k0; k < i; ++k) s -= a[static_cast<size_t>(i) * cols + (k - i) + p] * b[k];
    b[i] = s;
  }
  for (int i = rows - 1; i >= 0; --i) {
    Real s = b[i];
    const int k1 = std::min(rows - 1, i + p);
    for (int k = i + 1; k <= k1; ++k) s -= a[static_cast<size_t>(i) * cols + (k - i) + p] * b[k];
    b[i] = s / a[static_cast<size_t>(i) * cols + p];
  }
}

// Dense LU with partial pivoting for the small Schur block.
template <class Real>
bool dense_lu(std::vector<Real>& a, std::vector<int>& piv, int n, bool& positive) {
  piv.resize(n);
  positive = true;
  for (int k = 0; k < n; ++k) {
    int imax = k;
    Real amax = std::abs(a[static_cast<size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const Real v = std::abs(a[static_cast<size_t>(i) * n + k]);
      if (v > amax) {
        amax = v;
        imax = i;
      }
    }
    piv[k] = imax;
    if (imax != k) {
      positive = false;  // a row swap was needed
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(k) * n + j], a[static_cast<size_t>(imax) * n + j]);
    }
    const Real pivval = a[static_cast<size_t>(k) * n + k];
    if (!(std::isfinite(static_cast<double>(pivval))) || pivval == Real(0)) return false;
    if (pivval <= Real(0)) positive = false;
    for (int i = k + 1; i < n; ++i) {
      const Real l = a[static_cast<size_t>(i) * n + k] /= pivval;
      for (int j = k + 1; j < n; ++j)
        a[static_cast<size_t>(i) * n + j] -= l * a[static_cast<size_t>(k) * n + j];
    }
  }
  return true;
}

template <class Real>
void dense_lu_solve(const std::vector<Real>& a, const std::vector<int>& piv, int n, Real* b) {
  for (int k = 0; k < n; ++k) {
    if (piv[k] != k) std::swap(b[k], b[piv[k]]);
    for (int i = k + 1; i < n; ++i) b[i] -= a[static_cast<size_t>(i) * n + k] * b[k];
  }
  for (int i = n - 1; i >= 0; --i) {
    Real s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[static_cast<size_t>(i) * n + j] * b[j];
    b[i] = s / a[static_cast<size_t>(i) * n + i];
  }
}

}  // namespace

template <class Real>
void BandedSystemT<Real>::factorize() {
  if (factorized_) return;
  if (!cyclic_) {
    lu_ = band_;
    bool pos = false;
    if (!banded_lu(lu_, n_, p_, pos))
      throw Error("BandedSystem: factorization failed (zero pivot; matrix is singular or assembly is wrong)");
    pivots_positive_ = pos;
    factorized_ = true;
    return;
  }
  // bordered elimination: interior banded LU + dense Schur complement on the
  // last p unknowns (the wrap-around coupling).
  const int cols = band_cols();
  lu_.assign(static_cast<size_t>(m_) * cols, Real(0));
  for (int i = 0; i < m_; ++i)
    for (int d = -p_; d <= p_; ++d) {
      const int j = i + d;
      if (j >= 0 && j < m_) lu_[static_cast<size_t>(i) * cols + d + p_] = band_at(i, d);
    }
  bool pos_band = false;
  if (!banded_lu(lu_, m_, p_, pos_band))
    throw Error("BandedSystem: factorization failed (zero pivot in the interior band)");

  // W = A11^{-1} A12, column by column
  w_.assign(static_cast<size_t>(m_) * p_, Real(0));
  std::vector<Real> col(m_);
  for (int c = 0; c < p_; ++c) {
    for (int i = 0; i < m_; ++i) col[i] = entry(i, m_ + c);
    banded_lu_solve(lu_, m_, p_, col.data());
    for (int i = 0; i < m_; ++i) w_[static_cast<size_t>(i) * p_ + c] = col[i];
  }
  // S = A22 - A21 W
  schur_.assign(static_cast<size_t>(p_) * p_, Real(0));
  for (int c = 0; c < p_; ++c)
    for (int d = 0; d < p_; ++d) {
      Real s = entry(m_ + c, m_ + d);
      for (int i = std::max(0, m_ + c - p_); i < m_; ++i)
        s -= entry(m_ + c, i) * w_[static_cast<size_t>(i) * p_ + d];
      for (int i = 0; i < std::min(p_, m_); ++i)
        s -= bl_[static_cast<size_t>(c) * p_ + i] * w_[static_cast<size_t>(i) * p_ + d];
      schur_[static_cast<size_t>(c) * p_ + d] = s;
    }
  bool pos_schur = false;
  if (!dense_lu(schur_, schur_piv_, p_, pos_schur))
    throw Error("BandedSystem: factorization failed (singular wrap-around Schur block)");
  pivots_positive_ = pos_band && pos_schur;
  factorized_ = true;
}

template <class Real>
bool BandedSystemT<Real>::pivots_positive() const {
  if (!factorized_) throw Error("BandedSystem: not factorized");
  return pivots_positive_;
}

template <class Real>
void BandedSystemT<Real>::solve_factored(std::vector<Real>& b) const {
  if (static_cast<int>(b.size()) != n_) throw Error("BandedSystem: right-hand side length mismatch");
  solve_factored(b.data());
}

template <class Real>
void BandedSystemT<Real>::solve_factored(Real* b) const {
  if (!factorized_) throw Error("BandedSystem: solve before factorize");
  if (!cyclic_) {
    banded_lu_solve(lu_, n_, p_, b);
    return;
  }
  banded_lu_solve(lu_, m_, p_, b);
  Real t[16];
  for (int c = 0; c < p_; ++c) {
    Real s = b[m_ + c];
    for (int i = std::max(0, m_ + c - p_); i < m_; ++i) s -= entry(m_ + c, i) * b[i];
    for (int i = 0; i < std::min(p_, m_); ++i) s -= bl_[static_cast<size_t>(c) * p_ + i] * b[i];
    t[c] = s;
  }
  dense_lu_solve(schur_, schur_piv_, p_, t);
  for (int c = 0; c < p_; ++c) b[m_ + c] = t[c];
  for (int i = 0; i < m_; ++i) {
    Real s = b[i];
    const Real* wi = w_.data() + static_cast<size_t>(i) * p_;
    for (int c = 0; c < p_; ++c) s -= wi[c] * t[c];
    b[i] = s;
  }
}

template <class Real>
void BandedSystemT<Real>::solve_inplace(std::vector<Real>& b) {
  factorize();
  solve_factored(b);
}

template <class Real>
std::vector<Real> BandedSystemT<Real>::solve(std::vector<Real> b) {
  solve_inplace(b);
  return b;
}

template <class Real>
void BandedSystemT<Real>::matvec(const Real* x, Real* y) const {
  const int cols = band_cols();
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - p_), j1 = std::min(n_ - 1, i + p_);
    Real s = 0;
    const Real* row = band_.data() + static_cast<size_t>(i) * cols + p_;
    for (int j = j0; j <= j1; ++j) s += row[j - i] * x[j];
    y[i] = s;
  }
  if (cyclic_) {
    for (int i = 0; i < p_; ++i) {
      Real s = 0;
      for (int c = 0; c < p_; ++c) s += tr_[static_cast<size_t>(i) * p_ + c] * x[m_ + c];
      y[i] += s;
    }
    for (int c = 0; c < p_; ++c) {
      Real s = 0;
      for (int j = 0; j < p_; ++j) s += bl_[static_cast<size_t>(c) * p_ + j] * x[j];
      y[m_ + c] += s;
    }
  }
}

template <class Real>
std::vector<Real> BandedSystemT<Real>::matvec(const std::vector<Real>& x) const {
  if (static_cast<int>(x.size()) != n_) throw Error("BandedSystem: matvec length mismatch");
  std::vector<Real> y(n_);
  matvec(x.data(), y.data());
  return y;
}

template class BandedSystemT<double>;
template class BandedSystemT<long double>;

}  // namespace chfem
