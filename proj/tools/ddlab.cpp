// Command-line front end: sparsity sweeps, BER sweeps, impulse patterns and
// equalization-domain recommendations.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ddlab/domains.hpp"
#include "ddlab/equalize.hpp"
#include "ddlab/harness.hpp"
#include "ddlab/rng.hpp"

using namespace ddlab;
using nlohmann::json;

namespace {

struct Common {
  std::string scenario;
  int case_id = 1;
  std::size_t P = 256;
  std::size_t M = 16;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  unsigned threads = 1;
  std::string doppler_range;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--scenario", c.scenario, "Scenario JSON file; flags override its fields")->check(CLI::ExistingFile);
  app->add_option("--case", c.case_id, "Reference channel case 1..4");
  app->add_option("--P", c.P, "Frame size P = M*N");
  app->add_option("--M", c.M, "Delay-axis size M");
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--trials", c.trials, "Realizations (sparsity) or maximum trials per point (ber)");
  app->add_option("--threads", c.threads, "Worker threads; results do not depend on it");
  app->add_option("--doppler-range", c.doppler_range, "two-sided or one-sided")
      ->check(CLI::IsMember({"two-sided", "one-sided"}));
  app->add_option("--out", c.out, "Output file (default: stdout)");
}

bool given(const CLI::App* app, const char* name) { return app->count(name) > 0; }

// Scenario from the optional JSON file, then the explicit flags on top.
harness::Scenario base_scenario(const CLI::App* app, const Common& c) {
  harness::Scenario sc;
  if (!c.scenario.empty()) {
    std::ifstream in(c.scenario);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse scenario " + c.scenario + ": " + e.what());
    }
    sc = j.get<harness::Scenario>();
  } else {
    sc.schemes = harness::parse_scheme_list("sc,ofdm,otfs-dd,otfs-dt,otfs-fd");
    sc.snr_grid_db = harness::parse_grid("0:2:20");
  }
  if (given(app, "--case") || given(app, "--P") || given(app, "--M") || c.scenario.empty()) {
    const std::size_t P = given(app, "--P") || c.scenario.empty() ? c.P : sc.cfg.P;
    const std::size_t M = given(app, "--M") || c.scenario.empty() ? c.M : sc.cfg.M;
    if (M == 0 || P % M != 0) throw ConfigError("--M must divide --P");
    const int id = given(app, "--case") || c.scenario.empty() ? c.case_id : sc.cfg.case_id;
    const auto range = sc.cfg.doppler_range;
    if (id == 0) {
      sc.cfg.P = P;
      sc.cfg.M = M;
      sc.cfg.N = P / M;
    } else {
      sc.cfg = channel::case_config(id, P, M, P / M);
    }
    sc.cfg.doppler_range = range;
  }
  if (!c.doppler_range.empty())
    sc.cfg.doppler_range = c.doppler_range == "one-sided" ? channel::DopplerRange::OneSided : channel::DopplerRange::TwoSided;
  if (given(app, "--seed") || c.scenario.empty()) sc.seed = c.seed;
  if (given(app, "--trials")) sc.trials = c.trials;
  sc.threads = c.threads;
  sc.cfg.validate();
  return sc;
}

// Writes to --out or stdout. Files are written whole so a failed run leaves
// no partial output behind.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw ConfigError("failed to write " + path);
}

std::uint64_t realization_seed(const harness::Scenario& sc) {
  return derive_seed(sc.seed, {static_cast<std::uint64_t>(sc.cfg.case_id), std::uint64_t{0}});
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly selective channel laboratory"};
  app.require_subcommand(1);

  Common sp_c, ber_c, pat_c, rec_c;

  auto* sp = app.add_subcommand("sparsity", "LPR/SPR sweep over L_c in the dt, fD and dD_otfs domains");
  add_common(sp, sp_c);
  std::string lc_grid = "0:1:32";
  sp->add_option("--lc", lc_grid, "L_c grid, start:step:stop or a list");

  auto* ber = app.add_subcommand("ber", "Monte Carlo BER sweep");
  add_common(ber, ber_c);
  std::string schemes, snr, channel_mode, mod, method;
  std::size_t min_errors = 0, min_trials = 0;
  ber->add_option("--schemes", schemes, "Comma list of sc, ofdm, otfs-dd, otfs-dt, otfs-fd");
  ber->add_option("--snr", snr, "SNR grid in dB, start:step:stop or a list");
  ber->add_option("--channel", channel_mode, "full, band:<L_c> or topk:<L_c>");
  ber->add_option("--mod", mod, "qpsk or 16qam");
  ber->add_option("--method", method, "mmse or zf")->check(CLI::IsMember({"mmse", "zf"}));
  ber->add_option("--min-errors", min_errors, "Bit errors per point before an early stop");
  ber->add_option("--min-trials", min_trials, "Trials per point before an early stop");
  bool paired = false;
  ber->add_flag("--paired", paired, "Same channel and noise draws for every scheme in a trial");

  auto* pat = app.add_subcommand("pattern", "Received magnitude pattern of a single-symbol probe");
  add_common(pat, pat_c);
  std::string domain_in = "dd", domain_out, dump_paths, paths_file;
  std::size_t probe = 0;
  pat->add_option("--domain-in", domain_in, "Probe domain: dd, time or freq");
  pat->add_option("--domain-out", domain_out, "Observation domain (default: same as --domain-in)");
  pat->add_option("--probe", probe, "Probe index k < P");
  pat->add_option("--dump-paths", dump_paths, "Write the realized path set as JSON");
  pat->add_option("--paths", paths_file, "Use a path set from JSON instead of sampling")->check(CLI::ExistingFile);

  auto* rec = app.add_subcommand("recommend", "Best-fit equalization domain");
  add_common(rec, rec_c);
  std::string mode = "rule";
  std::size_t rec_lc = 0;
  equalize::RecommendThresholds th;
  rec->add_option("--mode", mode, "rule or metric")->check(CLI::IsMember({"rule", "metric"}));
  rec->add_option("--lc", rec_lc, "L_c for the LPR metrics (default: round(T_d))");
  rec->add_option("--theta-td", th.delay_spread, "Delay-spread threshold");
  rec->add_option("--theta-fd", th.doppler_spread, "Doppler-spread threshold");
  rec->add_option("--theta-dd", th.dd_lpr, "dD LPR threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sp) {
      auto sc = base_scenario(sp, sp_c);
      if (!given(sp, "--trials") && sp_c.scenario.empty()) sc.trials = 200;
      std::vector<std::size_t> grid;
      for (double v : harness::parse_grid(lc_grid)) {
        if (v < 0 || v != std::floor(v)) throw ConfigError("--lc values must be non-negative integers");
        grid.push_back(static_cast<std::size_t>(v));
      }
      std::ostringstream os;
      harness::write_sparsity_csv(os, harness::run_sparsity(sc, grid));
      emit(sp_c.out, os.str());
    } else if (*ber) {
      auto sc = base_scenario(ber, ber_c);
      if (!schemes.empty()) sc.schemes = harness::parse_scheme_list(schemes);
      if (!snr.empty()) sc.snr_grid_db = harness::parse_grid(snr);
      if (!channel_mode.empty()) sc.channel_mode = equalize::ChannelMode::parse(channel_mode);
      if (!mod.empty()) sc.constellation = mod;
      if (!method.empty()) sc.method = method == "zf" ? equalize::Method::ZF : equalize::Method::MMSE;
      if (given(ber, "--min-errors")) sc.min_bit_errors = min_errors;
      if (given(ber, "--min-trials")) sc.min_trials = min_trials;
      if (paired) sc.paired_trials = true;
      std::ostringstream os;
      harness::write_ber_csv(os, harness::run_ber(sc));
      emit(ber_c.out, os.str());
    } else if (*pat) {
      const auto sc = base_scenario(pat, pat_c);
      const auto in = parse_signal_domain(domain_in);
      const auto obs = domain_out.empty() ? in : parse_signal_domain(domain_out);
      channel::PathSet paths;
      if (!paths_file.empty()) {
        std::ifstream f(paths_file);
        paths = json::parse(f).get<channel::PathSet>();
      } else {
        paths = channel::sample_paths(sc.cfg, realization_seed(sc));
        paths.case_id = sc.cfg.case_id;
      }
      if (!dump_paths.empty()) emit(dump_paths, json(paths).dump(2) + "\n");
      const RMatrix mag = domains::impulse_pattern(paths, in, probe, sc.cfg.factorization(), obs);
      std::ostringstream os;
      os << "# domain=" << to_string(obs) << " probe=" << probe << " case=" << paths.case_id << " seed=" << paths.seed
         << "\n";
      for (Eigen::Index m = 0; m < mag.rows(); ++m) {
        for (Eigen::Index n = 0; n < mag.cols(); ++n) os << (n ? "," : "") << fmt(mag(m, n));
        os << "\n";
      }
      emit(pat_c.out, os.str());
    } else if (*rec) {
      const auto sc = base_scenario(rec, rec_c);
      equalize::RecommendOptions opts;
      opts.mode = mode == "metric" ? equalize::RecommendMode::Metric : equalize::RecommendMode::Rule;
      if (given(rec, "--lc")) opts.L_c = rec_lc;
      opts.thresholds = th;
      std::optional<DomainMatrix> H;
      if (opts.mode == equalize::RecommendMode::Metric || given(rec, "--lc")) {
        H = channel::build_H_dt(channel::sample_paths(sc.cfg, realization_seed(sc)), sc.cfg.P);
        H->fact = sc.cfg.factorization();
      }
      const auto r = equalize::recommend_domain(sc.cfg, H ? &*H : nullptr, opts);
      json out = {{"domain", to_string(r.domain)}, {"rule_fired", r.rule_fired}, {"metrics", r.metrics}};
      emit(rec_c.out, out.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "ddlab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
