#include <doctest.h>

#include "ddlab/channel.hpp"
#include "ddlab/domains.hpp"
#include "ddlab/sparsity.hpp"
#include "oracles.hpp"

using namespace ddlab;
using namespace ddlab::sparsity;

namespace {

DomainMatrix wrap(const CMatrix& A, MatrixDomain d = MatrixDomain::FreqDoppler) { return {d, A, std::nullopt}; }

// Brute force: per-column window and sorted selections written out directly.
double lpr_ref(const CMatrix& H, std::size_t L_c) {
  const auto P = H.rows();
  double acc = 0.0;
  for (Eigen::Index n = 0; n < P; ++n) {
    Eigen::Index q = 0;
    for (Eigen::Index m = 1; m < P; ++m)
      if (std::norm(H(m, n)) > std::norm(H(q, n))) q = m;
    double in = 0.0;
    for (long k = -long(L_c); k <= long(L_c); ++k) in += std::norm(H(((q + k) % P + P) % P, n));
    const double total = H.col(n).squaredNorm();
    acc += total == 0.0 ? 1.0 : in / total;
  }
  return acc / double(P);
}

double spr_ref(const CMatrix& H, std::size_t L_c) {
  const auto P = H.rows();
  double acc = 0.0;
  for (Eigen::Index n = 0; n < P; ++n) {
    std::vector<double> pw(P);
    for (Eigen::Index m = 0; m < P; ++m) pw[m] = std::norm(H(m, n));
    std::sort(pw.rbegin(), pw.rend());
    double in = 0.0;
    for (std::size_t k = 0; k < 2 * L_c + 1; ++k) in += pw[k];
    const double total = H.col(n).squaredNorm();
    acc += total == 0.0 ? 1.0 : in / total;
  }
  return acc / double(P);
}

// Average over columns of retained / original column power.
double column_retention(const CMatrix& T, const CMatrix& H) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < H.cols(); ++n) {
    const double total = H.col(n).squaredNorm();
    acc += total == 0.0 ? 1.0 : T.col(n).squaredNorm() / total;
  }
  return acc / double(H.cols());
}

DomainMatrix case_matrix(int c, std::uint64_t seed, MatrixDomain d, std::size_t P = 256) {
  const auto cfg = channel::case_config(c, P, 16, P / 16);
  return domains::to_domain(channel::build_H_dt(channel::sample_paths(cfg, seed), P), d, cfg.factorization());
}

}  // namespace

TEST_CASE("identity and uniform matrices") {
  const auto I = wrap(CMatrix::Identity(16, 16));
  for (std::size_t lc : {0u, 1u, 7u}) {
    CHECK(lpr(I, lc) == 1.0);
    CHECK(spr(I, lc) == 1.0);
    CHECK((truncate_band(I, lc).entries - I.entries).norm() == 0.0);
    CHECK((truncate_topk(I, lc).entries - I.entries).norm() == 0.0);
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ph(0, 2 * kPi);
  CMatrix U(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) U(i, j) = std::polar(0.3, ph(rng));
  for (std::size_t lc : {0u, 3u, 9u}) {
    CHECK(std::abs(lpr(wrap(U), lc) - double(2 * lc + 1) / 20.0) < 1e-12);
    CHECK(std::abs(spr(wrap(U), lc) - double(2 * lc + 1) / 20.0) < 1e-12);
  }
}

TEST_CASE("zero columns and bad windows") {
  CMatrix Z = CMatrix::Zero(8, 8);
  Z(2, 3) = 1.0;
  CHECK(lpr(wrap(Z), 0) == 1.0);
  CHECK(spr(wrap(Z), 0) == 1.0);
  CHECK_THROWS_AS(lpr(wrap(Z), 4), ConfigError);
  CHECK_THROWS_AS(truncate_band(wrap(Z), 4), ConfigError);
  CHECK_THROWS_AS(ratio_profile(wrap(Z), 4), ConfigError);
}

TEST_CASE("metrics agree with brute force") {
  std::mt19937_64 rng(3);
  for (int r = 0; r < 5; ++r) {
    const CMatrix A = oracle::random_matrix(33, 33, rng);
    const auto prof = ratio_profile(wrap(A), 16);
    for (std::size_t lc = 0; lc <= 16; ++lc) {
      CHECK(std::abs(lpr(wrap(A), lc) - lpr_ref(A, lc)) < 1e-12);
      CHECK(std::abs(spr(wrap(A), lc) - spr_ref(A, lc)) < 1e-12);
      CHECK(prof.lpr[lc] == lpr(wrap(A), lc));
      CHECK(prof.spr[lc] == spr(wrap(A), lc));
    }
  }
  const auto H = case_matrix(2, 5, MatrixDomain::DelayDopplerOtfs);
  const auto prof = ratio_profile(H, 32);
  for (std::size_t lc = 0; lc <= 32; lc += 4) {
    CHECK(prof.lpr[lc] == lpr(H, lc));
    CHECK(prof.spr[lc] == spr(H, lc));
    CHECK(std::abs(prof.lpr[lc] - lpr_ref(H.entries, lc)) < 1e-12);
  }
}

TEST_CASE("spr dominates lpr, both monotone, both reach 1") {
  std::mt19937_64 rng(5);
  for (int c = 1; c <= 4; ++c)
    for (auto d : {MatrixDomain::DelayTime, MatrixDomain::FreqDoppler, MatrixDomain::DelayDopplerOtfs}) {
      const auto H = case_matrix(c, 40 + c, d, 64);
      const auto prof = ratio_profile(H, 31);
      for (std::size_t lc = 0; lc <= 31; ++lc) {
        CHECK(prof.spr[lc] >= prof.lpr[lc]);
        CHECK(prof.lpr[lc] <= 1.0);
        if (lc > 0) {
          CHECK(prof.lpr[lc] >= prof.lpr[lc - 1]);
          CHECK(prof.spr[lc] >= prof.spr[lc - 1]);
        }
      }
    }
  // P odd so that 2 L_c + 1 = P is reachable
  const CMatrix A = oracle::random_matrix(15, 15, rng);
  CHECK(std::abs(lpr(wrap(A), 7) - 1.0) < 1e-14);
  CHECK(std::abs(spr(wrap(A), 7) - 1.0) < 1e-14);
  CHECK((truncate_band(wrap(A), 7).entries - A).norm() == 0.0);
}

TEST_CASE("scale and column phase invariance") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ph(0, 2 * kPi);
  const auto H = case_matrix(1, 3, MatrixDomain::DelayDopplerOtfs, 64);
  CMatrix R = H.entries * Complex(0.0, 3.5);
  for (Eigen::Index n = 0; n < R.cols(); ++n) R.col(n) *= std::polar(1.0, ph(rng));
  for (std::size_t lc : {0u, 2u, 5u, 10u}) {
    CHECK(std::abs(lpr(wrap(R), lc) - lpr(H, lc)) < 1e-12);
    CHECK(std::abs(spr(wrap(R), lc) - spr(H, lc)) < 1e-12);
  }
}

TEST_CASE("truncation keeps exactly the measured power") {
  for (int c = 1; c <= 4; ++c)
    for (auto d : {MatrixDomain::DelayTime, MatrixDomain::FreqDoppler, MatrixDomain::DelayDopplerOtfs}) {
      const auto H = case_matrix(c, 7, d, 64);
      for (std::size_t lc : {0u, 3u, 8u}) {
        const auto B = truncate_band(H, lc);
        const auto T = truncate_topk(H, lc);
        CHECK(B.domain == d);
        CHECK(T.domain == d);
        CHECK(std::abs(column_retention(B.entries, H.entries) - lpr(H, lc)) < 1e-12);
        CHECK(std::abs(column_retention(T.entries, H.entries) - spr(H, lc)) < 1e-12);
        for (Eigen::Index n = 0; n < H.entries.cols(); ++n) {
          CHECK((B.entries.col(n).array() != 0.0).count() <= Eigen::Index(2 * lc + 1));
          CHECK((T.entries.col(n).array() != 0.0).count() <= Eigen::Index(2 * lc + 1));
        }
      }
    }
  // A single path has equal column norms, so the global ratio matches too.
  const channel::PathSet one{{{Complex(0.7, 0.7), 2.4, 0.3}}, 0, 0};
  const auto H = channel::build_H_dt(one, 64);
  for (std::size_t lc : {0u, 2u, 6u})
    CHECK(std::abs(truncate_band(H, lc).entries.squaredNorm() / H.entries.squaredNorm() - lpr(H, lc)) < 1e-12);
}

TEST_CASE("reference-case sparsity levels") {
  const std::size_t R = 100;
  double dt_lpr = 0.0, dd_lpr = 0.0, dd_spr = 0.0, band = 0.0, topk = 0.0;
  for (std::uint64_t seed = 0; seed < R; ++seed) {
    const auto H = case_matrix(1, seed, MatrixDomain::DelayTime);
    const auto D = domains::to_dD_otfs(H, {16, 16});
    dt_lpr += lpr(H, 5);
    dd_lpr += lpr(D, 5);
    dd_spr += spr(D, 5);
    band += column_retention(truncate_band(D, 5).entries, D.entries);
    topk += column_retention(truncate_topk(D, 5).entries, D.entries);
  }
  dt_lpr /= R;
  dd_lpr /= R;
  dd_spr /= R;
  MESSAGE("case 1, L_c=5: dt LPR " << dt_lpr << ", dD LPR " << dd_lpr << ", dD SPR " << dd_spr);
  CHECK(dt_lpr > 0.97);
  CHECK(dd_spr - dd_lpr > 0.15);
  CHECK(topk > band);
}
