#include "ddlab/equalize.hpp"

#include <charconv>
#include <cmath>

#include "ddlab/domains.hpp"
#include "ddlab/sparsity.hpp"

namespace ddlab::equalize {

ChannelMode ChannelMode::parse(std::string_view s) {
  if (s == "full") return full();
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ConfigError("channel mode must be full, band:<L_c> or topk:<L_c>");
  const auto kind = s.substr(0, colon);
  const std::string num(s.substr(colon + 1));
  std::size_t lc = 0;
  const auto [end, ec] = std::from_chars(num.data(), num.data() + num.size(), lc);
  if (num.empty() || ec != std::errc() || end != num.data() + num.size())
    throw ConfigError("bad L_c in channel mode '" + std::string(s) + "'");
  if (kind == "band") return band(lc);
  if (kind == "topk") return topk(lc);
  throw ConfigError("unknown channel mode '" + std::string(s) + "'");
}

std::string ChannelMode::str() const {
  switch (kind) {
    case Kind::Full: return "full";
    case Kind::Band: return "band:" + std::to_string(L_c);
    case Kind::TopK: return "topk:" + std::to_string(L_c);
  }
  return "?";
}

CVector mmse_solve(const CMatrix& H, const CVector& y, double sigma2) {
  if (!(sigma2 >= 0.0)) throw ConfigError("mmse_solve: noise variance must be >= 0");
  if (H.rows() != y.size()) throw ConfigError("mmse_solve: H and y sizes disagree");

  if (sigma2 == 0.0) {
    if (H.rows() != H.cols()) throw ConfigError("mmse_solve: zero forcing needs a square H");
    Eigen::PartialPivLU<CMatrix> lu(H);
    // rcond() alone misses exact zero pivots, so check those first.
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (!(pivots.minCoeff() > 1e-13 * pivots.maxCoeff()) || !(lu.rcond() > 1e-13))
      throw SingularSystemError("zero-forcing solve on a singular channel matrix");
    return lu.solve(y);
  }

  // Only the lower triangle of the Gram matrix is formed.
  CMatrix gram = CMatrix::Zero(H.cols(), H.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(H.adjoint());
  gram.diagonal().array() += sigma2;
  const CVector rhs = H.adjoint() * y;
  Eigen::LLT<CMatrix, Eigen::Lower> llt(gram);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.adjoint();
  return Eigen::PartialPivLU<CMatrix>(gram).solve(rhs);
}

bool compatible(modem::SchemeId scheme, MatrixDomain eq_domain) {
  switch (scheme) {
    case modem::SchemeId::SC: return eq_domain == MatrixDomain::DelayTime;
    case modem::SchemeId::OFDM: return eq_domain == MatrixDomain::FreqDoppler;
    case modem::SchemeId::OTFS:
      return eq_domain == MatrixDomain::DelayTime || eq_domain == MatrixDomain::FreqDoppler ||
             eq_domain == MatrixDomain::DelayDopplerOtfs;
  }
  return false;
}

DomainMatrix equalizer_channel(const DomainMatrix& H_dt, const EqualizerSpec& spec, const LayeredFactorization& fact) {
  DomainMatrix H = domains::to_domain(H_dt, spec.eq_domain, fact);
  switch (spec.channel_mode.kind) {
    case ChannelMode::Kind::Full: return H;
    case ChannelMode::Kind::Band: return sparsity::truncate_band(H, spec.channel_mode.L_c);
    case ChannelMode::Kind::TopK: return sparsity::truncate_topk(H, spec.channel_mode.L_c);
  }
  return H;
}

CVector equalize_with(modem::SchemeId scheme, const EqualizerSpec& spec, const DomainMatrix& H_eq,
                      const SymbolFrame& y_t, const LayeredFactorization& fact) {
  if (!compatible(scheme, spec.eq_domain))
    throw ConfigError("scheme " + std::string(modem::to_string(scheme)) + " cannot be equalized in the " +
                      std::string(to_string(spec.eq_domain)) + " domain");
  if (H_eq.domain != spec.eq_domain) throw ConfigError("equalizer channel is in the wrong domain");
  if (y_t.domain != SignalDomain::Time) throw ConfigError("received frame must be in the time domain");
  if (static_cast<std::size_t>(y_t.values.size()) != fact.P() || H_eq.size() != fact.P())
    throw ConfigError("equalize: frame size does not match P");

  const SignalDomain eq_signal = signal_domain_of(spec.eq_domain);
  const SymbolFrame y_eq = domains::convert_frame(y_t, eq_signal, fact);
  const SymbolFrame x_eq{eq_signal, mmse_solve(H_eq.entries, y_eq.values, spec.effective_noise_variance())};
  return domains::convert_frame(x_eq, modem::data_domain(scheme), fact).values;
}

CVector equalize(modem::SchemeId scheme, const EqualizerSpec& spec, const DomainMatrix& H_dt, const SymbolFrame& y_t,
                 const LayeredFactorization& fact) {
  if (!compatible(scheme, spec.eq_domain))
    throw ConfigError("scheme " + std::string(modem::to_string(scheme)) + " cannot be equalized in the " +
                      std::string(to_string(spec.eq_domain)) + " domain");
  return equalize_with(scheme, spec, equalizer_channel(H_dt, spec, fact), y_t, fact);
}

DomainRecommendation recommend_domain(const std::optional<channel::ChannelCaseConfig>& cfg, const DomainMatrix* H_dt,
                                      const RecommendOptions& opts) {
  if (H_dt && H_dt->domain != MatrixDomain::DelayTime) throw ConfigError("recommend_domain: H must be a dt matrix");

  std::optional<std::size_t> L_c = opts.L_c;
  if (!L_c && cfg) L_c = static_cast<std::size_t>(std::lround(cfg->T_d));
  std::optional<LayeredFactorization> fact;
  if (H_dt && H_dt->fact) fact = H_dt->fact;
  else if (cfg) fact = cfg->factorization();

  DomainRecommendation rec;
  auto compute_metrics = [&] {
    if (!L_c) throw ConfigError("recommend_domain: metric evaluation needs L_c");
    if (!fact) throw ConfigError("recommend_domain: metric evaluation needs a factorization");
    for (auto d : {MatrixDomain::DelayTime, MatrixDomain::FreqDoppler, MatrixDomain::DelayDopplerOtfs})
      rec.metrics[std::string(to_string(d))] = sparsity::lpr(domains::to_domain(*H_dt, d, fact), *L_c);
  };

  if (opts.mode == RecommendMode::Metric) {
    if (!H_dt) throw ConfigError("recommend_domain: metric mode needs a channel matrix");
    compute_metrics();
    const double dt = rec.metrics.at("dt"), fd = rec.metrics.at("fD"), dd = rec.metrics.at("dD_otfs");
    rec.domain = MatrixDomain::FreqDoppler;
    rec.rule_fired = "max LPR: fD";
    if (dt > fd && dt >= dd) {
      rec.domain = MatrixDomain::DelayTime;
      rec.rule_fired = "max LPR: dt";
    } else if (dd > fd && dd > dt) {
      rec.domain = MatrixDomain::DelayDopplerOtfs;
      rec.rule_fired = "max LPR: dD_otfs";
    }
    return rec;
  }

  if (!cfg) throw ConfigError("recommend_domain: rule mode needs a channel configuration");
  if (H_dt) compute_metrics();
  const auto& th = opts.thresholds;
  if (cfg->T_d <= th.delay_spread) {
    rec.domain = MatrixDomain::DelayTime;
    rec.rule_fired = "Small T_d";
  } else if (cfg->F_d <= th.doppler_spread) {
    rec.domain = MatrixDomain::FreqDoppler;
    rec.rule_fired = "T_d is large and F_d is not very large";
  } else if (H_dt && rec.metrics.at("dD_otfs") >= th.dd_lpr) {
    rec.domain = MatrixDomain::DelayDopplerOtfs;
    rec.rule_fired = "Sparse channels in dD-domain";
  } else {
    rec.domain = MatrixDomain::FreqDoppler;
    rec.rule_fired = "Other channels";
  }
  return rec;
}

}  // namespace ddlab::equalize
