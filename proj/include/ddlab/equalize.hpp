#pragma once

#include <map>
#include <optional>
#include <string>

#include "ddlab/channel.hpp"
#include "ddlab/modem.hpp"
#include "ddlab/types.hpp"

namespace ddlab::equalize {

enum class Method { ZF, MMSE };

/// Which part of the eq-domain channel the equalizer is built from.
struct ChannelMode {
  enum class Kind { Full, Band, TopK };
  Kind kind = Kind::Full;
  std::size_t L_c = 0;

  static ChannelMode full() { return {}; }
  static ChannelMode band(std::size_t L_c) { return {Kind::Band, L_c}; }
  static ChannelMode topk(std::size_t L_c) { return {Kind::TopK, L_c}; }

  /// "full", "band:<L_c>" or "topk:<L_c>".
  static ChannelMode parse(std::string_view s);
  std::string str() const;

  bool operator==(const ChannelMode&) const = default;
};

struct EqualizerSpec {
  Method method = Method::MMSE;
  MatrixDomain eq_domain = MatrixDomain::DelayTime;
  ChannelMode channel_mode;
  double noise_variance = 0.0;

  /// sigma^2 the solve actually uses (0 for ZF).
  double effective_noise_variance() const { return method == Method::ZF ? 0.0 : noise_variance; }
};

/// x = (H^H H + sigma2 I)^{-1} H^H y by a dense factorization. sigma2 == 0 is
/// zero forcing and throws SingularSystemError on a numerically singular H.
CVector mmse_solve(const CMatrix& H, const CVector& y, double sigma2);

/// Whether a scheme can be equalized in `eq_domain`
/// (SC: dt, OFDM: fD, OTFS: dt, fD or dD_otfs).
bool compatible(modem::SchemeId scheme, MatrixDomain eq_domain);

/// Eq-domain channel matrix, truncated per spec.channel_mode.
DomainMatrix equalizer_channel(const DomainMatrix& H_dt, const EqualizerSpec& spec, const LayeredFactorization& fact);

/// Full receive chain: eq-domain channel, truncation, received frame in the
/// eq domain, linear solve, and conversion of the estimate to the scheme's
/// data domain.
CVector equalize(modem::SchemeId scheme, const EqualizerSpec& spec, const DomainMatrix& H_dt, const SymbolFrame& y_t,
                 const LayeredFactorization& fact);

/// Same chain with a precomputed equalizer_channel().
CVector equalize_with(modem::SchemeId scheme, const EqualizerSpec& spec, const DomainMatrix& H_eq,
                      const SymbolFrame& y_t, const LayeredFactorization& fact);

enum class RecommendMode { Rule, Metric };

struct RecommendThresholds {
  double delay_spread = 8.0;    // T_d at or below: dt
  double doppler_spread = 0.5;  // F_d at or below (with large T_d): fD
  double dd_lpr = 0.9;          // dD LPR at or above: dD_otfs
};

struct RecommendOptions {
  RecommendMode mode = RecommendMode::Rule;
  std::optional<std::size_t> L_c;  // defaults to round(T_d)
  RecommendThresholds thresholds;
};

struct DomainRecommendation {
  MatrixDomain domain = MatrixDomain::FreqDoppler;
  std::string rule_fired;
  std::map<std::string, double> metrics;  // LPR per domain tag, when computed
};

/// Best-fit equalization domain, either from the scenario's delay/Doppler
/// spreads (rule) or as the domain with the largest LPR (metric, ties to fD).
/// H_dt may be null in rule mode; metric mode needs it.
DomainRecommendation recommend_domain(const std::optional<channel::ChannelCaseConfig>& cfg, const DomainMatrix* H_dt,
                                      const RecommendOptions& opts);

}  // namespace ddlab::equalize
