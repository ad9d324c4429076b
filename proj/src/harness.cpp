#include "ddlab/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ddlab/domains.hpp"
#include "ddlab/rng.hpp"

namespace ddlab::harness {

namespace {

enum Stream : std::uint64_t { kChannel = 1, kBits = 2, kNoise = 3 };

// Stands in for the scheme coordinate of paired trials; no SchemeId uses it.
constexpr std::uint64_t kShared = 0xFF;

// Runs fn(i) for i < count on up to `threads` workers. Each index writes only
// its own slot, so results do not depend on the worker layout.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string method_name(equalize::Method m) { return m == equalize::Method::ZF ? "zf" : "mmse"; }

equalize::Method parse_method(std::string_view s) {
  if (s == "zf") return equalize::Method::ZF;
  if (s == "mmse") return equalize::Method::MMSE;
  throw ConfigError("unknown equalizer method '" + std::string(s) + "'");
}

DomainMatrix trial_channel(const Scenario& sc, std::uint64_t seed) {
  if (sc.identity_channel) return {MatrixDomain::DelayTime, CMatrix::Identity(sc.cfg.P, sc.cfg.P), sc.cfg.factorization()};
  DomainMatrix H = channel::build_H_dt(channel::sample_paths(sc.cfg, seed), sc.cfg.P);
  H.fact = sc.cfg.factorization();
  return H;
}

modem::Bits random_bits(std::size_t count, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  modem::Bits bits(count);
  for (std::size_t i = 0; i < count; i += 64) {
    const std::uint64_t word = rng();
    for (std::size_t b = 0; b < 64 && i + b < count; ++b) bits[i + b] = static_cast<std::uint8_t>((word >> b) & 1u);
  }
  return bits;
}

constexpr std::size_t kBatch = 8;

}  // namespace

CVector awgn(const CVector& v, double sigma2, std::uint64_t noise_seed) {
  if (!(sigma2 >= 0.0)) throw ConfigError("awgn: noise variance must be >= 0");
  if (sigma2 == 0.0) return v;
  Rng rng = make_rng(noise_seed);
  std::normal_distribution<double> g(0.0, std::sqrt(sigma2 / 2.0));
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    out[i] = v[i] + Complex(re, im);
  }
  return out;
}

SchemeSetup SchemeSetup::parse(std::string_view s) {
  using modem::SchemeId;
  if (s == "sc") return {SchemeId::SC, MatrixDomain::DelayTime};
  if (s == "ofdm") return {SchemeId::OFDM, MatrixDomain::FreqDoppler};
  if (s == "otfs-dd" || s == "otfs") return {SchemeId::OTFS, MatrixDomain::DelayDopplerOtfs};
  if (s == "otfs-dt" || s == "otfs-td") return {SchemeId::OTFS, MatrixDomain::DelayTime};
  if (s == "otfs-fd") return {SchemeId::OTFS, MatrixDomain::FreqDoppler};
  throw ConfigError("unknown scheme '" + std::string(s) + "' (sc, ofdm, otfs-dd, otfs-dt, otfs-fd)");
}

std::string SchemeSetup::name() const {
  switch (scheme) {
    case modem::SchemeId::SC: return eq_domain == MatrixDomain::DelayTime ? "sc" : "sc-?";
    case modem::SchemeId::OFDM: return "ofdm";
    case modem::SchemeId::OTFS:
      switch (eq_domain) {
        case MatrixDomain::DelayTime: return "otfs-dt";
        case MatrixDomain::FreqDoppler: return "otfs-fd";
        case MatrixDomain::DelayDopplerOtfs: return "otfs-dd";
        default: return "otfs-?";
      }
  }
  return "?";
}

std::vector<SchemeSetup> parse_scheme_list(std::string_view csv) {
  std::vector<SchemeSetup> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto end = std::min(csv.find(',', start), csv.size());
    const auto tok = csv.substr(start, end - start);
    if (!tok.empty()) out.push_back(SchemeSetup::parse(tok));
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("empty scheme list");
  return out;
}

std::vector<double> parse_grid(std::string_view s) {
  std::vector<double> out;
  auto num = [&](std::string_view t) {
    const std::string str(t);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(str, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (str.empty() || pos != str.size()) throw ConfigError("bad number '" + str + "' in grid '" + std::string(s) + "'");
    return v;
  };
  if (s.find(':') != std::string_view::npos) {
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ConfigError("range grid must be start:step:stop");
    const double a = num(s.substr(0, c1)), step = num(s.substr(c1 + 1, c2 - c1 - 1)), b = num(s.substr(c2 + 1));
    if (!(step > 0.0) || b < a) throw ConfigError("range grid needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find(',', start), s.size());
    if (end > start) out.push_back(num(s.substr(start, end - start)));
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

void Scenario::validate() const {
  cfg.validate();
  if (schemes.empty()) throw ConfigError("scenario has no schemes");
  if (snr_grid_db.empty()) throw ConfigError("scenario SNR grid is empty");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  for (const auto& s : schemes)
    if (!equalize::compatible(s.scheme, s.eq_domain)) throw ConfigError("incompatible scheme setup " + s.name());
  (void)modem::Constellation::by_name(constellation);
}

void to_json(nlohmann::json& j, const Scenario& s) {
  std::vector<std::string> schemes;
  for (const auto& x : s.schemes) schemes.push_back(x.name());
  j = {{"case", s.cfg.case_id},
       {"L", s.cfg.L},
       {"T_d", s.cfg.T_d},
       {"F_d", s.cfg.F_d},
       {"R_f", s.cfg.R_f},
       {"doppler_range", s.cfg.doppler_range == channel::DopplerRange::TwoSided ? "two-sided" : "one-sided"},
       {"P", s.cfg.P},
       {"M", s.cfg.M},
       {"schemes", schemes},
       {"channel_mode", s.channel_mode.str()},
       {"method", method_name(s.method)},
       {"snr_db", s.snr_grid_db},
       {"trials", s.trials},
       {"min_trials", s.min_trials},
       {"min_errors", s.min_bit_errors},
       {"seed", s.seed},
       {"mod", s.constellation},
       {"paired_trials", s.paired_trials}};
}

void from_json(const nlohmann::json& j, Scenario& s) {
  const std::size_t P = j.value("P", std::size_t{256});
  const std::size_t M = j.value("M", std::size_t{16});
  if (M == 0 || P % M != 0) throw ConfigError("scenario: M must divide P");
  const int case_id = j.value("case", 0);
  if (case_id != 0) {
    s.cfg = channel::case_config(case_id, P, M, P / M);
  } else {
    s.cfg = channel::ChannelCaseConfig{};
    s.cfg.P = P;
    s.cfg.M = M;
    s.cfg.N = P / M;
    s.cfg.L = j.at("L").get<std::size_t>();
    s.cfg.T_d = j.at("T_d").get<double>();
    s.cfg.F_d = j.at("F_d").get<double>();
    s.cfg.R_f = j.at("R_f").get<double>();
  }
  if (j.contains("doppler_range"))
    s.cfg.doppler_range = j.at("doppler_range").get<std::string>() == "one-sided" ? channel::DopplerRange::OneSided
                                                                                   : channel::DopplerRange::TwoSided;
  s.schemes.clear();
  for (const auto& name : j.value("schemes", std::vector<std::string>{"sc", "ofdm", "otfs-dd", "otfs-dt", "otfs-fd"}))
    s.schemes.push_back(SchemeSetup::parse(name));
  s.channel_mode = equalize::ChannelMode::parse(j.value("channel_mode", std::string("full")));
  s.method = parse_method(j.value("method", std::string("mmse")));
  s.snr_grid_db = j.value("snr_db", std::vector<double>{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20});
  s.trials = j.value("trials", std::size_t{100});
  s.min_trials = j.value("min_trials", std::size_t{10});
  s.min_bit_errors = j.value("min_errors", std::size_t{200});
  s.seed = j.value("seed", std::uint64_t{1});
  s.constellation = j.value("mod", std::string("qpsk"));
  s.paired_trials = j.value("paired_trials", false);
  s.validate();
}

std::vector<BerRecord> run_ber(const Scenario& sc) {
  sc.validate();
  const auto fact = sc.cfg.factorization();
  const auto constellation = modem::Constellation::by_name(sc.constellation);
  const std::size_t P = sc.cfg.P;
  const std::size_t bits_per_frame = P * constellation.bits_per_symbol();

  // Setups sharing a modulation scheme are simulated on the same frames.
  std::vector<modem::SchemeId> groups;
  for (const auto& s : sc.schemes)
    if (std::find(groups.begin(), groups.end(), s.scheme) == groups.end()) groups.push_back(s.scheme);

  std::vector<BerRecord> records;
  for (std::size_t snr_idx = 0; snr_idx < sc.snr_grid_db.size(); ++snr_idx) {
    const double snr_db = sc.snr_grid_db[snr_idx];
    const double sigma2 = std::pow(10.0, -snr_db / 10.0);

    for (const auto scheme : groups) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < sc.schemes.size(); ++i)
        if (sc.schemes[i].scheme == scheme) members.push_back(i);

      std::vector<std::uint64_t> errors(members.size(), 0);
      std::size_t done = 0;
      while (done < sc.trials) {
        const std::size_t batch = std::min(kBatch, sc.trials - done);
        std::vector<std::vector<std::uint64_t>> batch_errors(batch, std::vector<std::uint64_t>(members.size(), 0));
        parallel_for(batch, sc.threads, [&](std::size_t b) {
          const std::uint64_t t = done + b;
          const auto case_id = static_cast<std::uint64_t>(sc.cfg.case_id);
          const std::uint64_t trial_seed =
              derive_seed(sc.seed, {case_id, static_cast<std::uint64_t>(scheme), snr_idx, t});
          // Paired trials draw channel and noise from a scheme-independent stream.
          const std::uint64_t shared_seed = sc.paired_trials ? derive_seed(sc.seed, {case_id, kShared, snr_idx, t}) : trial_seed;
          const DomainMatrix H_dt = trial_channel(sc, derive_seed(shared_seed, {kChannel}));
          const modem::Bits bits = random_bits(bits_per_frame, derive_seed(trial_seed, {kBits}));
          const CVector s = modem::map_bits(bits, constellation);
          const SymbolFrame x = modem::modulate(scheme, s, fact);
          const SymbolFrame y{SignalDomain::Time, awgn(H_dt.entries * x.values, sigma2, derive_seed(shared_seed, {kNoise}))};
          for (std::size_t k = 0; k < members.size(); ++k) {
            const equalize::EqualizerSpec spec{sc.method, sc.schemes[members[k]].eq_domain, sc.channel_mode, sigma2};
            const modem::Bits decided = modem::hard_demap(equalize::equalize(scheme, spec, H_dt, y, fact), constellation);
            std::uint64_t e = 0;
            for (std::size_t i = 0; i < bits.size(); ++i) e += bits[i] != decided[i];
            batch_errors[b][k] = e;
          }
        });
        for (const auto& be : batch_errors)
          for (std::size_t k = 0; k < members.size(); ++k) errors[k] += be[k];
        done += batch;

        const bool enough_errors =
            std::all_of(errors.begin(), errors.end(), [&](std::uint64_t e) { return e >= sc.min_bit_errors; });
        if (done >= sc.min_trials && enough_errors) break;
      }

      for (std::size_t k = 0; k < members.size(); ++k) {
        BerRecord r;
        r.case_id = sc.cfg.case_id;
        r.setup = sc.schemes[members[k]];
        r.channel_mode = sc.channel_mode.str();
        r.snr_db = snr_db;
        r.bit_errors = errors[k];
        r.bits_sent = static_cast<std::uint64_t>(done) * bits_per_frame;
        r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(r.bits_sent);
        r.trials = done;
        r.seed = sc.seed;
        records.push_back(r);
      }
    }
  }

  // Report in the scenario's scheme order, then SNR.
  std::stable_sort(records.begin(), records.end(), [&](const BerRecord& a, const BerRecord& b) {
    auto pos = [&](const SchemeSetup& s) { return std::find(sc.schemes.begin(), sc.schemes.end(), s) - sc.schemes.begin(); };
    return pos(a.setup) < pos(b.setup);
  });
  return records;
}

std::vector<sparsity::SparsityRecord> run_sparsity(const Scenario& sc, const std::vector<std::size_t>& lc_grid) {
  sc.cfg.validate();
  if (sc.trials < 1) throw ConfigError("trials must be >= 1");
  if (lc_grid.empty()) throw ConfigError("empty L_c grid");
  const std::size_t max_lc = *std::max_element(lc_grid.begin(), lc_grid.end());
  if (2 * max_lc + 1 > sc.cfg.P) throw ConfigError("L_c grid exceeds the frame size");
  const auto fact = sc.cfg.factorization();
  constexpr MatrixDomain kDomains[] = {MatrixDomain::DelayTime, MatrixDomain::FreqDoppler,
                                       MatrixDomain::DelayDopplerOtfs};

  // per realization, per domain
  std::vector<std::array<sparsity::RatioProfile, 3>> profiles(sc.trials);
  parallel_for(sc.trials, sc.threads, [&](std::size_t t) {
    const DomainMatrix H_dt =
        trial_channel(sc, derive_seed(sc.seed, {static_cast<std::uint64_t>(sc.cfg.case_id), std::uint64_t{t}}));
    for (std::size_t d = 0; d < 3; ++d)
      profiles[t][d] = sparsity::ratio_profile(domains::to_domain(H_dt, kDomains[d], fact), max_lc);
  });

  std::vector<sparsity::SparsityRecord> out;
  for (std::size_t d = 0; d < 3; ++d) {
    for (auto metric : {sparsity::Metric::Lpr, sparsity::Metric::Spr}) {
      for (auto lc : lc_grid) {
        double acc = 0.0;
        for (const auto& p : profiles) acc += (metric == sparsity::Metric::Lpr ? p[d].lpr : p[d].spr)[lc];
        out.push_back({sc.cfg.case_id, kDomains[d], metric, lc, acc / static_cast<double>(sc.trials), sc.trials, sc.seed});
      }
    }
  }
  return out;
}

void write_ber_csv(std::ostream& os, const std::vector<BerRecord>& records) {
  os << "case,scheme,eq_domain,channel_mode,snr_db,bit_errors,bits_sent,ber,trials,seed\n";
  for (const auto& r : records)
    os << r.case_id << ',' << r.setup.name() << ',' << to_string(r.setup.eq_domain) << ',' << r.channel_mode << ','
       << fmt_double(r.snr_db) << ',' << r.bit_errors << ',' << r.bits_sent << ',' << fmt_double(r.ber) << ','
       << r.trials << ',' << r.seed << '\n';
}

void write_sparsity_csv(std::ostream& os, const std::vector<sparsity::SparsityRecord>& records) {
  os << "case,domain,metric,L_c,value,realizations,seed\n";
  for (const auto& r : records)
    os << r.case_id << ',' << to_string(r.domain) << ',' << sparsity::to_string(r.metric) << ',' << r.L_c << ','
       << fmt_double(r.value) << ',' << r.realizations << ',' << r.seed << '\n';
}

}  // namespace ddlab::harness
