#include <doctest.h>

#include "ddlab/domains.hpp"
#include "ddlab/sparsity.hpp"
#include "ddlab/spectral.hpp"
#include "oracles.hpp"

using namespace ddlab;
using namespace ddlab::domains;

namespace {

DomainMatrix dt(const CMatrix& A) { return {MatrixDomain::DelayTime, A, std::nullopt}; }

channel::PathSet single(Complex g, double delay, double doppler) { return {{{g, delay, doppler}}, 0, 0}; }

channel::ChannelCaseConfig small_cfg(std::size_t L, double T_d, double F_d, std::size_t M, std::size_t N) {
  channel::ChannelCaseConfig cfg;
  cfg.L = L;
  cfg.T_d = T_d;
  cfg.F_d = F_d;
  cfg.R_f = 3;
  cfg.M = M;
  cfg.N = N;
  cfg.P = M * N;
  return cfg;
}

double max_abs(const CMatrix& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("identity channel in every domain") {
  const auto I = dt(CMatrix::Identity(16, 16));
  CHECK(max_abs(to_ft(I).entries - oracle::dft_matrix(16)) < 1e-14);
  CHECK(max_abs(to_fD(I).entries - CMatrix::Identity(16, 16)) < 1e-14);
  CHECK(max_abs(to_dD_otfs(I, {4, 4}).entries - CMatrix::Identity(16, 16)) < 1e-14);
  CHECK(max_abs(to_dD_direct(to_fD(I)).entries - CMatrix::Identity(16, 16)) < 1e-14);
  CHECK(to_dD_otfs(I, {4, 4}).fact == LayeredFactorization(4, 4));
}

TEST_CASE("transforms match the dense conjugations") {
  std::mt19937_64 rng(21);
  const std::size_t M = 4, N = 8, P = 32;
  const CMatrix A = oracle::random_matrix(P, P, rng);
  const CMatrix F = oracle::dft_matrix(P), K = oracle::kron_dft(M, N);
  CHECK(max_abs(to_ft(dt(A)).entries - F * A) < 1e-12);
  CHECK(max_abs(to_fD(dt(A)).entries - F * A * F.adjoint()) < 1e-12);
  CHECK(max_abs(to_dD_otfs(dt(A), {M, N}).entries - K * A * K.adjoint()) < 1e-12);
  const auto fD = to_fD(dt(A));
  CHECK(max_abs(to_dD_direct(fD).entries - F.adjoint() * fD.entries * F) < 1e-12);
  CHECK(max_abs(to_dD_direct(fD).entries - A) < 1e-12);
}

TEST_CASE("wrong input domains are rejected") {
  const auto I = dt(CMatrix::Identity(8, 8));
  const auto fD = to_fD(I);
  CHECK_THROWS_AS(to_fD(fD), ConfigError);
  CHECK_THROWS_AS(to_ft(fD), ConfigError);
  CHECK_THROWS_AS(to_dD_otfs(fD, {2, 4}), ConfigError);
  CHECK_THROWS_AS(to_dD_direct(I), ConfigError);
  CHECK_THROWS_AS(to_dD_otfs(I, {4, 4}), ConfigError);
  CHECK_THROWS_AS(to_domain(I, MatrixDomain::DelayDopplerOtfs, std::nullopt), ConfigError);
}

TEST_CASE("zero-Doppler channels diagonalize in fD") {
  channel::PathSet p{{{Complex(0.8, 0.1), 0, 0}, {Complex(0.2, -0.4), 3, 0}, {Complex(-0.1, 0.3), 7, 0}}, 0, 0};
  const std::size_t P = 32;
  const auto H = channel::build_H_dt(p, P);
  const CMatrix fD = to_fD(H).entries;
  for (std::size_t m = 0; m < P; ++m)
    for (std::size_t n = 0; n < P; ++n) {
      Complex ref = 0.0;
      if (m == n)
        for (const auto& path : p.paths) ref += path.gain * std::polar(1.0, -2.0 * kPi * double(n) * path.delay / double(P));
      CHECK(std::abs(fD(m, n) - ref) < 1e-12);
    }

  // H_ft F^H is diagonal for any circulant H_dt, on grid or not.
  const auto off = channel::build_H_dt(channel::sample_paths(small_cfg(4, 5.5, 0, 4, 8), 3), P);
  CMatrix D = to_ft(off).entries * oracle::dft_matrix(P).adjoint();
  D.diagonal().setZero();
  CHECK(max_abs(D) < 1e-12);
}

TEST_CASE("closed-form fD matrix") {
  const std::size_t P = 32;
  SUBCASE("on-grid delay") {
    const CMatrix H = fD_closed_form(single(1.0, 3, 0), P).entries;
    for (std::size_t n = 0; n < P; ++n) CHECK(std::abs(H(n, n) - std::polar(1.0, -2.0 * kPi * 3.0 * double(n) / P)) < 1e-13);
    CHECK(std::abs(H.squaredNorm() - double(P)) < 1e-9);
  }
  SUBCASE("integer Doppler shifts the diagonal") {
    const CMatrix H = fD_closed_form(single(1.0, 0, 1), P).entries;
    for (std::size_t n = 0; n < P; ++n) CHECK(std::abs(H((n + 1) % P, n) - 1.0) < 1e-13);
    CHECK(std::abs(H.squaredNorm() - double(P)) < 1e-9);
  }
  SUBCASE("agrees with the transform for off-grid paths") {
    const CMatrix a = to_fD(channel::build_H_dt(single(1.0, 1.3, 0.4), P)).entries;
    CHECK(max_abs(a - fD_closed_form(single(1.0, 1.3, 0.4), P).entries) < 1e-6);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(0.0, 10.0), v(-2.0, 2.0), ph(0.0, 2 * kPi);
    for (int r = 0; r < 50; ++r) {
      const auto p = single(std::polar(1.0, ph(rng)), d(rng), v(rng));
      CHECK(max_abs(to_fD(channel::build_H_dt(p, P)).entries - fD_closed_form(p, P).entries) < 1e-6);
    }
  }
}

TEST_CASE("dD_otfs of an on-grid delay keeps the block shift") {
  const std::size_t M = 8, N = 4;
  const auto H = channel::build_H_dt(single(1.0, 3, 0), M * N);
  const CMatrix K = oracle::kron_dft(M, N);
  const CMatrix dD = to_dD_otfs(H, {M, N}).entries;
  CHECK(max_abs(dD * K - K * H.entries) < 1e-12);
}

TEST_CASE("columns of dD_otfs follow the modulation chain") {
  const auto cfg = small_cfg(3, 6, 1, 8, 8);
  const auto fact = cfg.factorization();
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto H = channel::build_H_dt(channel::sample_paths(cfg, seed), cfg.P);
    const CMatrix dD = to_dD_otfs(H, fact).entries;
    for (int r = 0; r < 10; ++r) {
      const std::size_t q = rng() % cfg.P;
      CVector e = CVector::Zero(cfg.P);
      e[q] = 1.0;
      const CVector col = spectral::kron_dft_rows(H.entries * spectral::kron_idft_rows(e, fact), fact);
      CHECK((col - dD.col(q)).norm() < 1e-12);
    }
  }
}

TEST_CASE("Frobenius norm is the same in every domain") {
  for (int c = 1; c <= 4; ++c) {
    const auto cfg = channel::case_config(c, 256, 16, 16);
    const auto H = channel::build_H_dt(channel::sample_paths(cfg, 100 + c), cfg.P);
    const double n = H.entries.norm();
    for (auto d : {MatrixDomain::FreqTime, MatrixDomain::FreqDoppler, MatrixDomain::DelayDopplerOtfs,
                   MatrixDomain::DelayDopplerDirect})
      CHECK(std::abs(to_domain(H, d, cfg.factorization()).entries.norm() - n) / n < 1e-9);
  }
}

TEST_CASE("ft has no useful sparsity") {
  const auto cfg = channel::case_config(2, 256, 16, 16);
  double ft = 0.0, dtv = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto H = channel::build_H_dt(channel::sample_paths(cfg, seed), cfg.P);
    dtv += sparsity::lpr(H, 8);
    ft += sparsity::lpr(to_ft(H), 8);
  }
  CHECK(ft < dtv);
}

TEST_CASE("convert_frame") {
  std::mt19937_64 rng(2);
  const LayeredFactorization fact(16, 64);
  const SymbolFrame t{SignalDomain::Time, oracle::random_vector(fact.P(), rng)};
  for (auto a : {SignalDomain::Frequency, SignalDomain::DelayDoppler}) {
    const auto x = convert_frame(t, a, fact);
    CHECK(x.domain == a);
    CHECK(std::abs(x.values.norm() - t.values.norm()) / t.values.norm() < 1e-12);
    CHECK(oracle::rel_err(convert_frame(x, SignalDomain::Time, fact).values, t.values) < 1e-12);
  }
  const auto f = convert_frame(t, SignalDomain::Frequency, std::nullopt);
  CHECK(oracle::rel_err(convert_frame(convert_frame(f, SignalDomain::DelayDoppler, fact), SignalDomain::Frequency, fact).values,
                        f.values) < 1e-12);
  CHECK_THROWS_AS(convert_frame(t, SignalDomain::DelayDoppler, std::nullopt), ConfigError);

  SymbolFrame dd{SignalDomain::DelayDoppler, CVector::Zero(fact.P())};
  dd.values[0] = 1.0;
  const CVector x = convert_frame(dd, SignalDomain::Time, fact).values;
  for (std::size_t i = 0; i < fact.P(); ++i) {
    const double expect = i % 16 == 0 ? 1.0 / 8.0 : 0.0;
    CHECK(std::abs(x[i] - expect) < 1e-14);
  }
}

TEST_CASE("impulse patterns") {
  const LayeredFactorization fact(8, 8);
  SUBCASE("identity channel") {
    const auto pat = impulse_pattern(single(1.0, 0, 0), SignalDomain::Time, 19, fact);
    CHECK(pat.rows() == 8);
    CHECK(pat.cols() == 8);
    CHECK(std::abs(pat(19 % 8, 19 / 8) - 1.0) < 1e-14);
    CHECK(std::abs(pat.sum() - 1.0) < 1e-12);
  }
  SUBCASE("on-grid delay") {
    const auto pat = impulse_pattern(single(1.0, 5, 0), SignalDomain::Time, 0, fact);
    CHECK(std::abs(pat(5, 0) - 1.0) < 1e-12);
    CHECK(std::abs(pat.sum() - 1.0) < 1e-12);
  }
  SUBCASE("bad probe") { CHECK_THROWS_AS(impulse_pattern(single(1.0, 0, 0), SignalDomain::Time, 64, fact), ConfigError); }
  SUBCASE("delay-Doppler probe on a 16x4 frame") {
    // rows above a quarter of the peak stay within the delay spread, and every
    // time segment carries energy
    const auto cfg = small_cfg(3, 6, 1, 16, 4);
    std::size_t worst_rows = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto pat = impulse_pattern(channel::sample_paths(cfg, seed), SignalDomain::DelayDoppler, 0,
                                       cfg.factorization(), SignalDomain::Time);
      const double floor = 0.25 * pat.maxCoeff();
      std::size_t rows = 0;
      for (Eigen::Index m = 0; m < pat.rows(); ++m) rows += pat.row(m).maxCoeff() > floor;
      worst_rows = std::max(worst_rows, rows);
      for (Eigen::Index n = 0; n < pat.cols(); ++n) CHECK(pat.col(n).maxCoeff() > floor);
    }
    MESSAGE("widest delay support " << worst_rows << " rows");
    CHECK(worst_rows <= std::size_t(cfg.T_d + 3));
  }
}
