#pragma once

#include <span>

#include "ddlab/types.hpp"

namespace ddlab::spectral {

enum class Direction { Forward, Inverse };

/// Unitary P-point DFT: out[p] = P^{-1/2} sum_k v[k] exp(-+ j 2 pi k p / P).
/// Mixed-radix Cooley-Tukey, O(P log P) for smooth sizes.
CVector unitary_dft(const CVector& v, Direction dir);
void unitary_dft_inplace(std::span<Complex> v, Direction dir);

/// Element (m, n) of the twiddle matrix is exp(-j 2 pi m n / P), P = M N.
class TwiddleMatrix {
 public:
  explicit TwiddleMatrix(const LayeredFactorization& fact);

  std::size_t rows() const { return static_cast<std::size_t>(w_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(w_.cols()); }
  Complex operator()(std::size_t m, std::size_t n) const { return w_(m, n); }
  const CMatrix& matrix() const { return w_; }

 private:
  CMatrix w_;
};

/// (F_N^H kron I_M) v: reshape v column-wise into M x N, unitary N-point IDFT
/// along every row, vectorize column-wise.
CVector kron_idft_rows(const CVector& v, const LayeredFactorization& fact);

/// In-place (F_N^H kron I_M) for Inverse, (F_N kron I_M) for Forward.
void kron_rows_inplace(std::span<Complex> v, const LayeredFactorization& fact, Direction dir);

/// Adjoint of kron_idft_rows, i.e. (F_N kron I_M) v.
CVector kron_dft_rows(const CVector& v, const LayeredFactorization& fact);

/// Three-stage layered IDFT:
///   1. fill an M x N array row-wise, unitary M-point IDFT on each column,
///   2. multiply element (m, b) by conj(W)(m, b) = exp(+j 2 pi m b / P),
///   3. unitary N-point IDFT on each row, vectorize column-wise.
/// Equal to unitary_dft(v, Inverse).
CVector layered_idft(const CVector& v, const LayeredFactorization& fact);

/// OTFS precoder: the inverse of stages 1-2 of layered_idft applied to a
/// delay-Doppler vector. layered_idft(otfs_precoder(s)) == kron_idft_rows(s).
CVector otfs_precoder(const CVector& s, const LayeredFactorization& fact);

}  // namespace ddlab::spectral
