#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ddlab/types.hpp"

namespace ddlab::channel {

/// Range Dopplers are drawn from: [-F_d, F_d] or [0, F_d].
enum class DopplerRange { TwoSided, OneSided };

/// Scenario parameters. Delay is in samples (1/B), Doppler in bins (B/P),
/// Rician factor in dB. case_id 0 marks a custom configuration.
struct ChannelCaseConfig {
  int case_id = 0;
  std::size_t L = 1;
  double T_d = 0.0;
  double F_d = 0.0;
  double R_f = 0.0;
  std::size_t P = 256;
  std::size_t M = 16;
  std::size_t N = 16;
  DopplerRange doppler_range = DopplerRange::TwoSided;

  LayeredFactorization factorization() const { return {M, N}; }
  void validate() const;
};

/// One of the four reference scenarios with the given frame split.
ChannelCaseConfig case_config(int case_id, std::size_t P, std::size_t M, std::size_t N);

struct Path {
  Complex gain;
  double delay = 0.0;
  double doppler = 0.0;
};

/// A realized channel. Gains are normalized to unit total power.
struct PathSet {
  std::vector<Path> paths;
  std::uint64_t seed = 0;
  int case_id = 0;

  double total_power() const;
};

/// Draws delays uniformly on [0, T_d], Dopplers on the configured range and
/// Rician gains: path 1 carries a fixed LOS term of power K/(K+1), every path
/// gets a CN(0, 1/(L(K+1))) scatter term, K = 10^(R_f/10). Deterministic in (cfg, seed).
PathSet sample_paths(const ChannelCaseConfig& cfg, std::uint64_t seed);

/// (1/P) sum_{p<P} exp(j 2 pi p x / P), in closed form.
Complex dirichlet(double x, std::size_t P);

/// (H_dt)_{m,n} = sum_l h_l D((m - n - tau_l) mod P) exp(j 2 pi m nu_l / P).
DomainMatrix build_H_dt(const PathSet& paths, std::size_t P);

void to_json(nlohmann::json& j, const PathSet& p);
void from_json(const nlohmann::json& j, PathSet& p);

}  // namespace ddlab::channel
