#include "ddlab/channel.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ddlab/rng.hpp"

namespace ddlab::channel {

void ChannelCaseConfig::validate() const {
  if (P != M * N) throw ConfigError("P must equal M*N");
  if (P == 0) throw ConfigError("P must be >= 1");
  if (L < 1) throw ConfigError("L must be >= 1");
  if (!(T_d >= 0.0) || !(T_d < static_cast<double>(P))) throw ConfigError("T_d must lie in [0, P)");
  if (!(F_d >= 0.0) || !std::isfinite(F_d)) throw ConfigError("F_d must be finite and >= 0");
  if (!std::isfinite(R_f)) throw ConfigError("R_f must be finite");
}

ChannelCaseConfig case_config(int case_id, std::size_t P, std::size_t M, std::size_t N) {
  ChannelCaseConfig cfg;
  cfg.case_id = case_id;
  cfg.P = P;
  cfg.M = M;
  cfg.N = N;
  switch (case_id) {
    case 1: cfg.L = 2; cfg.T_d = 5;  cfg.F_d = 2;   cfg.R_f = 10; break;  // LEO satellite
    case 2: cfg.L = 2; cfg.T_d = 8;  cfg.F_d = 0.5; cfg.R_f = 5;  break;  // airplane
    case 3: cfg.L = 8; cfg.T_d = 16; cfg.F_d = 0.1; cfg.R_f = 6;  break;  // HST, strong LOS
    case 4: cfg.L = 8; cfg.T_d = 24; cfg.F_d = 0.2; cfg.R_f = 2;  break;  // HST, weak LOS
    default: throw ConfigError("unknown case id " + std::to_string(case_id) + " (expected 1..4)");
  }
  cfg.validate();
  return cfg;
}

double PathSet::total_power() const {
  double p = 0.0;
  for (const auto& path : paths) p += std::norm(path.gain);
  return p;
}

PathSet sample_paths(const ChannelCaseConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> delay_dist(0.0, cfg.T_d);
  const double lo = cfg.doppler_range == DopplerRange::TwoSided ? -cfg.F_d : 0.0;
  std::uniform_real_distribution<double> doppler_dist(lo, cfg.F_d);

  const double K = std::pow(10.0, cfg.R_f / 10.0);
  const double scatter_sigma = std::sqrt(1.0 / ((K + 1.0) * static_cast<double>(cfg.L)) / 2.0);
  std::normal_distribution<double> scatter(0.0, scatter_sigma);

  PathSet out;
  out.seed = seed;
  out.case_id = cfg.case_id;
  out.paths.resize(cfg.L);
  for (auto& path : out.paths) {
    path.delay = cfg.T_d > 0.0 ? delay_dist(rng) : 0.0;
    path.doppler = cfg.F_d > 0.0 ? doppler_dist(rng) : 0.0;
    const double re = scatter(rng);
    const double im = scatter(rng);
    path.gain = {re, im};
  }
  out.paths.front().gain += std::sqrt(K / (K + 1.0));

  const double norm = std::sqrt(out.total_power());
  for (auto& path : out.paths) path.gain /= norm;
  return out;
}

Complex dirichlet(double x, std::size_t P) {
  const double p = static_cast<double>(P);
  const double xr = std::remainder(x, p);
  if (xr == 0.0) return 1.0;
  const double mag = std::sin(kPi * xr) / (p * std::sin(kPi * xr / p));
  return std::polar(mag, kPi * xr * (p - 1.0) / p);
}

DomainMatrix build_H_dt(const PathSet& paths, std::size_t P) {
  if (paths.paths.empty()) throw ConfigError("build_H_dt: empty path set");
  if (P == 0) throw ConfigError("build_H_dt: P must be >= 1");
  for (const auto& path : paths.paths)
    if (!(path.delay >= 0.0) || !(path.delay < static_cast<double>(P)))
      throw ConfigError("build_H_dt: path delay outside [0, P)");

  DomainMatrix H{MatrixDomain::DelayTime, CMatrix::Zero(P, P), std::nullopt};
  std::vector<Complex> kernel(P), phase(P);
  for (const auto& path : paths.paths) {
    for (std::size_t k = 0; k < P; ++k) kernel[k] = path.gain * dirichlet(static_cast<double>(k) - path.delay, P);
    for (std::size_t m = 0; m < P; ++m)
      phase[m] = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) * path.doppler / static_cast<double>(P));
    for (std::size_t n = 0; n < P; ++n) {
      // column n: rows m < n wrap to kernel[P - n + m], rows m >= n use kernel[m - n]
      Complex* col = H.entries.col(static_cast<Eigen::Index>(n)).data();
      for (std::size_t m = 0; m < n; ++m) col[m] += kernel[P - n + m] * phase[m];
      for (std::size_t m = n; m < P; ++m) col[m] += kernel[m - n] * phase[m];
    }
  }
  return H;
}

void to_json(nlohmann::json& j, const PathSet& p) {
  auto arr = nlohmann::json::array();
  for (const auto& path : p.paths)
    arr.push_back({{"re", path.gain.real()}, {"im", path.gain.imag()}, {"delay", path.delay}, {"doppler", path.doppler}});
  j = {{"seed", p.seed}, {"case", p.case_id}, {"paths", std::move(arr)}};
}

void from_json(const nlohmann::json& j, PathSet& p) {
  p.seed = j.at("seed").get<std::uint64_t>();
  p.case_id = j.value("case", 0);
  p.paths.clear();
  for (const auto& e : j.at("paths"))
    p.paths.push_back({{e.at("re").get<double>(), e.at("im").get<double>()}, e.at("delay").get<double>(),
                       e.at("doppler").get<double>()});
}

}  // namespace ddlab::channel
