#include "ddlab/domains.hpp"

#include <functional>
#include <span>

#include "ddlab/spectral.hpp"

namespace ddlab::domains {

using spectral::Direction;

namespace {

void require(const DomainMatrix& H, MatrixDomain expected, const char* op) {
  if (H.domain != expected)
    throw ConfigError(std::string(op) + ": expected " + std::string(to_string(expected)) + " matrix, got " +
                      std::string(to_string(H.domain)));
}

using ColumnOp = std::function<void(std::span<Complex>)>;

void transform_columns(CMatrix& A, const ColumnOp& op) {
  for (Eigen::Index c = 0; c < A.cols(); ++c) op({A.col(c).data(), static_cast<std::size_t>(A.rows())});
}

// Right-multiplication by a symmetric unitary U: row r of A U is U applied to
// row r, done on the columns of the transpose.
void transform_rows(CMatrix& A, const ColumnOp& op) {
  CMatrix T = A.transpose();
  transform_columns(T, op);
  A = T.transpose();
}

ColumnOp dft(Direction dir) {
  return [dir](std::span<Complex> v) { spectral::unitary_dft_inplace(v, dir); };
}

ColumnOp kron(const LayeredFactorization& fact, Direction dir) {
  return [fact, dir](std::span<Complex> v) { spectral::kron_rows_inplace(v, fact, dir); };
}

void check_fact(const LayeredFactorization& fact, std::size_t P) {
  if (fact.P() != P) throw ConfigError("factorization P=" + std::to_string(fact.P()) + " does not match size " + std::to_string(P));
}

}  // namespace

DomainMatrix to_ft(const DomainMatrix& H) {
  require(H, MatrixDomain::DelayTime, "to_ft");
  DomainMatrix out{MatrixDomain::FreqTime, H.entries, H.fact};
  transform_columns(out.entries, dft(Direction::Forward));
  return out;
}

DomainMatrix to_fD(const DomainMatrix& H) {
  require(H, MatrixDomain::DelayTime, "to_fD");
  DomainMatrix out{MatrixDomain::FreqDoppler, H.entries, H.fact};
  transform_columns(out.entries, dft(Direction::Forward));
  transform_rows(out.entries, dft(Direction::Inverse));
  return out;
}

DomainMatrix to_dD_otfs(const DomainMatrix& H, const LayeredFactorization& fact) {
  require(H, MatrixDomain::DelayTime, "to_dD_otfs");
  check_fact(fact, H.size());
  DomainMatrix out{MatrixDomain::DelayDopplerOtfs, H.entries, fact};
  transform_columns(out.entries, kron(fact, Direction::Forward));
  transform_rows(out.entries, kron(fact, Direction::Inverse));
  return out;
}

DomainMatrix to_dD_direct(const DomainMatrix& H_fD) {
  require(H_fD, MatrixDomain::FreqDoppler, "to_dD_direct");
  DomainMatrix out{MatrixDomain::DelayDopplerDirect, H_fD.entries, H_fD.fact};
  transform_columns(out.entries, dft(Direction::Inverse));
  transform_rows(out.entries, dft(Direction::Forward));
  return out;
}

DomainMatrix to_domain(const DomainMatrix& H_dt, MatrixDomain target, const std::optional<LayeredFactorization>& fact) {
  require(H_dt, MatrixDomain::DelayTime, "to_domain");
  switch (target) {
    case MatrixDomain::DelayTime: return H_dt;
    case MatrixDomain::FreqTime: return to_ft(H_dt);
    case MatrixDomain::FreqDoppler: return to_fD(H_dt);
    case MatrixDomain::DelayDopplerDirect: return to_dD_direct(to_fD(H_dt));
    case MatrixDomain::DelayDopplerOtfs:
      if (!fact) throw ConfigError("to_domain: dD_otfs needs a factorization");
      return to_dD_otfs(H_dt, *fact);
  }
  throw ConfigError("to_domain: unknown domain");
}

DomainMatrix fD_closed_form(const channel::PathSet& paths, std::size_t P) {
  if (paths.paths.empty()) throw ConfigError("fD_closed_form: empty path set");
  DomainMatrix H{MatrixDomain::FreqDoppler, CMatrix::Zero(P, P), std::nullopt};
  std::vector<Complex> kernel(P), phase(P);
  for (const auto& path : paths.paths) {
    for (std::size_t k = 0; k < P; ++k)
      kernel[k] = path.gain * std::conj(channel::dirichlet(static_cast<double>(k) - path.doppler, P));
    for (std::size_t n = 0; n < P; ++n)
      phase[n] = std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * path.delay / static_cast<double>(P));
    for (std::size_t n = 0; n < P; ++n) {
      Complex* col = H.entries.col(static_cast<Eigen::Index>(n)).data();
      for (std::size_t m = 0; m < P; ++m) col[m] += kernel[(m + P - n) % P] * phase[n];
    }
  }
  return H;
}

SymbolFrame convert_frame(const SymbolFrame& v, SignalDomain target, const std::optional<LayeredFactorization>& fact) {
  if (v.domain == target) return v;
  auto need_fact = [&]() -> const LayeredFactorization& {
    if (!fact) throw ConfigError("convert_frame: delay-Doppler conversion needs a factorization");
    return *fact;
  };

  CVector time;
  switch (v.domain) {
    case SignalDomain::Time: time = v.values; break;
    case SignalDomain::Frequency: time = spectral::unitary_dft(v.values, Direction::Inverse); break;
    case SignalDomain::DelayDoppler: time = spectral::kron_idft_rows(v.values, need_fact()); break;
  }
  switch (target) {
    case SignalDomain::Time: return {target, std::move(time)};
    case SignalDomain::Frequency: return {target, spectral::unitary_dft(time, Direction::Forward)};
    case SignalDomain::DelayDoppler: return {target, spectral::kron_dft_rows(time, need_fact())};
  }
  throw ConfigError("convert_frame: unknown target domain");
}

RMatrix impulse_pattern(const channel::PathSet& paths, SignalDomain input_domain, std::size_t probe_index,
                        const LayeredFactorization& fact, SignalDomain observe_domain) {
  const std::size_t P = fact.P();
  if (probe_index >= P) throw ConfigError("impulse_pattern: probe index " + std::to_string(probe_index) + " >= P");
  SymbolFrame probe{input_domain, CVector::Zero(P)};
  probe.values[static_cast<Eigen::Index>(probe_index)] = 1.0;
  const CVector x_t = convert_frame(probe, SignalDomain::Time, fact).values;
  const DomainMatrix H = channel::build_H_dt(paths, P);
  const SymbolFrame y_t{SignalDomain::Time, H.entries * x_t};
  const CVector y = convert_frame(y_t, observe_domain, fact).values;

  RMatrix out(fact.M(), fact.N());
  for (std::size_t n = 0; n < fact.N(); ++n)
    for (std::size_t m = 0; m < fact.M(); ++m) out(m, n) = std::abs(y[m + fact.M() * n]);
  return out;
}

}  // namespace ddlab::domains
