#pragma once

#include <vector>

namespace chfem {

// Symmetric-pattern banded matrix with optional periodic (cyclic) wrap-around
// blocks, plus an in-place LU factorization:
//   - plain banded LU for dirichlet-type systems,
//   - banded LU on the leading block with a dense bordered Schur complement
//     for the wrap-around coupling in the cyclic case (O(dim * band^2)).
// No pivoting is performed in the banded part; the Gram matrices this stores
// are positive definite and the collocation matrices are diagonally dominant.
// Real = long double instantiations back the ill-conditioned H1 solves of the
// boundary-value pipeline, whose finest-level errors sit below the double
// rounding floor.
template <class Real>
class BandedSystemT {
 public:
  BandedSystemT() = default;
  BandedSystemT(int dim, int halfband, bool cyclic);

  int dim() const { return n_; }
  int halfband() const { return p_; }
  bool cyclic() const { return cyclic_; }
  bool factorized() const { return factorized_; }

  void add(int i, int j, Real v);
  Real entry(int i, int j) const;  // zero outside the stored pattern

  // Factorizes once; throws Error on a zero or non-finite pivot.
  void factorize();
  // All factorization pivots positive (positive-definiteness certificate).
  bool pivots_positive() const;

  void solve_inplace(std::vector<Real>& b);
  std::vector<Real> solve(std::vector<Real> b);
  // Const variants require factorize() to have been called.
  void solve_factored(std::vector<Real>& b) const;
  void solve_factored(Real* b) const;

  void matvec(const Real* x, Real* y) const;
  std::vector<Real> matvec(const std::vector<Real>& x) const;

 private:
  int band_cols() const { return 2 * p_ + 1; }
  Real band_at(int i, int off) const { return band_[static_cast<size_t>(i) * band_cols() + off + p_]; }

  int n_ = 0, p_ = 0, m_ = 0;  // m_ = n - p (cyclic interior size)
  bool cyclic_ = false;
  bool factorized_ = false;
  bool pivots_positive_ = false;

  std::vector<Real> band_;   // original entries, n x (2p+1), row-major
  std::vector<Real> tr_;     // p x p top-right corner (cyclic)
  std::vector<Real> bl_;     // p x p bottom-left corner (cyclic)
  std::vector<Real> lu_;     // factored band (interior block for cyclic)
  std::vector<Real> w_;      // m x p block A11^{-1} A12 (cyclic)
  std::vector<Real> schur_;  // p x p factored Schur complement (cyclic)
  std::vector<int> schur_piv_;
};

using BandedSystem = BandedSystemT<double>;

extern template class BandedSystemT<double>;
extern template class BandedSystemT<long double>;

}  // namespace chfem
