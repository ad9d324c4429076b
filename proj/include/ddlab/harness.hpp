#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ddlab/channel.hpp"
#include "ddlab/equalize.hpp"
#include "ddlab/modem.hpp"
#include "ddlab/sparsity.hpp"

namespace ddlab::harness {

/// Adds circular complex Gaussian noise of variance sigma2 per sample.
CVector awgn(const CVector& v, double sigma2, std::uint64_t noise_seed);

/// A modulation scheme together with the domain it is equalized in.
struct SchemeSetup {
  modem::SchemeId scheme = modem::SchemeId::SC;
  MatrixDomain eq_domain = MatrixDomain::DelayTime;

  /// sc, ofdm, otfs-dd, otfs-dt, otfs-fd
  static SchemeSetup parse(std::string_view s);
  std::string name() const;

  bool operator==(const SchemeSetup&) const = default;
};

std::vector<SchemeSetup> parse_scheme_list(std::string_view csv);

struct Scenario {
  channel::ChannelCaseConfig cfg = channel::case_config(1, 256, 16, 16);
  std::vector<SchemeSetup> schemes;
  equalize::ChannelMode channel_mode;
  equalize::Method method = equalize::Method::MMSE;
  std::vector<double> snr_grid_db;
  std::size_t trials = 100;      // per point, upper bound
  std::size_t min_trials = 10;   // before an early stop
  std::size_t min_bit_errors = 200;
  std::uint64_t seed = 1;
  std::string constellation = "qpsk";
  bool identity_channel = false;  // test hook: H_dt = I
  // Every scheme sees the same channel and noise draws in trial t (common
  // random numbers); bits stay per scheme. Off: all streams are per scheme.
  bool paired_trials = false;
  unsigned threads = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

struct BerRecord {
  int case_id = 0;
  SchemeSetup setup;
  std::string channel_mode;
  double snr_db = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_sent = 0;
  double ber = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo BER sweep. Every trial draws a fresh channel, bits and noise
/// from a substream of (seed, case, scheme, SNR index, trial). Setups of the
/// same scheme share those substreams, so they see identical frames.
/// With paired_trials the channel and noise streams drop the scheme.
std::vector<BerRecord> run_ber(const Scenario& sc);

/// LPR and SPR of the dt, fD and dD_otfs matrices averaged over sc.trials
/// realizations, for every L_c in the grid.
std::vector<sparsity::SparsityRecord> run_sparsity(const Scenario& sc, const std::vector<std::size_t>& lc_grid);

void write_ber_csv(std::ostream& os, const std::vector<BerRecord>& records);
void write_sparsity_csv(std::ostream& os, const std::vector<sparsity::SparsityRecord>& records);

/// "a:step:b" inclusive range or a comma-separated list.
std::vector<double> parse_grid(std::string_view s);

}  // namespace ddlab::harness
