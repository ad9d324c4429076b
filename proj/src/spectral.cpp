#include "ddlab/spectral.hpp"

#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

namespace ddlab::spectral {

namespace {

// exp(-j 2 pi k / n) for k < n, cached per size and thread.
const std::vector<Complex>& forward_roots(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<Complex>> cache;
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<Complex> roots(n);
  for (std::size_t k = 0; k < n; ++k)
    roots[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  return cache.emplace(n, std::move(roots)).first->second;
}

std::size_t smallest_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t f = 3; f * f <= n; f += 2)
    if (n % f == 0) return f;
  return n;
}

struct Plan {
  const std::vector<Complex>& roots;
  std::size_t total;
  bool inverse;

  // exp(-+ j 2 pi j / n) for a sub-transform of size n dividing total.
  Complex root(std::size_t j, std::size_t n) const {
    const Complex w = roots[(j % n) * (total / n)];
    return inverse ? std::conj(w) : w;
  }
};

// Unnormalized mixed-radix DFT of in[0], in[stride], ..., written
// contiguously into out. Used for sizes that are not powers of two.
void transform(const Complex* in, std::size_t stride, Complex* out, std::size_t n, const Plan& plan) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t radix = smallest_factor(n);
  if (radix == n) {
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += in[j * stride] * plan.root(j * k, n);
      out[k] = acc;
    }
    return;
  }
  const std::size_t m = n / radix;
  for (std::size_t q = 0; q < radix; ++q) transform(in + q * stride, stride * radix, out + q * m, m, plan);

  // X[k + m r] = sum_q w_n^{q (k + m r)} Y_q[k]
  std::vector<Complex> tmp(radix);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t q = 0; q < radix; ++q) tmp[q] = out[q * m + k];
    for (std::size_t r = 0; r < radix; ++r) {
      const std::size_t idx = k + m * r;
      Complex acc = tmp[0];
      for (std::size_t q = 1; q < radix; ++q) acc += tmp[q] * plan.root(q * idx, n);
      out[idx] = acc;
    }
  }
}

bool is_pow2(std::size_t n) { return (n & (n - 1)) == 0; }

// Iterative radix-2: bit reversal, then butterflies with roots from the table.
void radix2(std::span<Complex> x, const Plan& plan) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2, step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex w = plan.inverse ? std::conj(plan.roots[k * step]) : plan.roots[k * step];
        const Complex u = x[i + k];
        const Complex v = x[i + k + half] * w;
        x[i + k] = u + v;
        x[i + k + half] = u - v;
      }
    }
  }
}

}  // namespace

void unitary_dft_inplace(std::span<Complex> buf, Direction dir) {
  const std::size_t n = buf.size();
  if (n == 0) throw ConfigError("unitary_dft: empty input");
  const Plan plan{forward_roots(n), n, dir == Direction::Inverse};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  if (is_pow2(n)) {
    radix2(buf, plan);
    for (auto& z : buf) z *= scale;
    return;
  }
  std::vector<Complex> out(n);
  transform(buf.data(), 1, out.data(), n, plan);
  for (std::size_t k = 0; k < n; ++k) buf[k] = out[k] * scale;
}

namespace {

void check_length(const CVector& v, const LayeredFactorization& fact) {
  if (static_cast<std::size_t>(v.size()) != fact.P())
    throw ConfigError("vector length " + std::to_string(v.size()) + " does not match P=" +
                      std::to_string(fact.P()));
}

CVector transform_rows(const CVector& v, const LayeredFactorization& fact, Direction dir) {
  check_length(v, fact);
  CVector out = v;
  kron_rows_inplace({out.data(), static_cast<std::size_t>(out.size())}, fact, dir);
  return out;
}

}  // namespace

void kron_rows_inplace(std::span<Complex> v, const LayeredFactorization& fact, Direction dir) {
  if (v.size() != fact.P())
    throw ConfigError("vector length " + std::to_string(v.size()) + " does not match P=" + std::to_string(fact.P()));
  const std::size_t M = fact.M(), N = fact.N();
  std::vector<Complex> row(N);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) row[n] = v[m + M * n];
    unitary_dft_inplace(row, dir);
    for (std::size_t n = 0; n < N; ++n) v[m + M * n] = row[n];
  }
}

namespace {

// exp(-j 2 pi m b / P), exact index reduction before the table lookup.
Complex twiddle(std::size_t m, std::size_t b, std::size_t p) { return forward_roots(p)[(m * b) % p]; }

}  // namespace

CVector unitary_dft(const CVector& v, Direction dir) {
  if (v.size() == 0) throw ConfigError("unitary_dft: empty input");
  CVector out = v;
  unitary_dft_inplace({out.data(), static_cast<std::size_t>(out.size())}, dir);
  return out;
}

TwiddleMatrix::TwiddleMatrix(const LayeredFactorization& fact) : w_(fact.M(), fact.N()) {
  for (std::size_t m = 0; m < fact.M(); ++m)
    for (std::size_t n = 0; n < fact.N(); ++n) w_(m, n) = twiddle(m, n, fact.P());
}

CVector kron_idft_rows(const CVector& v, const LayeredFactorization& fact) {
  return transform_rows(v, fact, Direction::Inverse);
}

CVector kron_dft_rows(const CVector& v, const LayeredFactorization& fact) {
  return transform_rows(v, fact, Direction::Forward);
}

CVector layered_idft(const CVector& v, const LayeredFactorization& fact) {
  check_length(v, fact);
  const std::size_t M = fact.M(), N = fact.N(), P = fact.P();
  CMatrix grid(M, N);
  std::vector<Complex> col(M);
  for (std::size_t b = 0; b < N; ++b) {
    for (std::size_t a = 0; a < M; ++a) col[a] = v[N * a + b];
    unitary_dft_inplace(col, Direction::Inverse);
    for (std::size_t m = 0; m < M; ++m) grid(m, b) = col[m] * std::conj(twiddle(m, b, P));
  }
  CVector staged(P);
  for (std::size_t b = 0; b < N; ++b)
    for (std::size_t m = 0; m < M; ++m) staged[m + M * b] = grid(m, b);
  return transform_rows(staged, fact, Direction::Inverse);
}

CVector otfs_precoder(const CVector& s, const LayeredFactorization& fact) {
  check_length(s, fact);
  const std::size_t M = fact.M(), N = fact.N(), P = fact.P();
  CVector out(P);
  std::vector<Complex> col(M);
  for (std::size_t b = 0; b < N; ++b) {
    for (std::size_t m = 0; m < M; ++m) col[m] = s[m + M * b] * twiddle(m, b, P);
    unitary_dft_inplace(col, Direction::Forward);
    for (std::size_t a = 0; a < M; ++a) out[N * a + b] = col[a];
  }
  return out;
}

}  // namespace ddlab::spectral
