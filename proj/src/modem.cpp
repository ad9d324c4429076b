#include "ddlab/modem.hpp"

#include <cmath>
#include <limits>

#include "ddlab/spectral.hpp"

namespace ddlab::modem {

Constellation Constellation::qpsk() {
  const double a = 1.0 / std::sqrt(2.0);
  // label b0 b1 -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)
  return {"qpsk", 2, {{a, a}, {a, -a}, {-a, a}, {-a, -a}}};
}

Constellation Constellation::qam16() {
  // Per-axis Gray levels for a two-bit label: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
  constexpr double level[4] = {-3.0, -1.0, 3.0, 1.0};
  const double scale = 1.0 / std::sqrt(10.0);
  std::vector<Complex> pts(16);
  for (std::size_t label = 0; label < 16; ++label)
    pts[label] = Complex(level[label >> 2], level[label & 3]) * scale;
  return {"16qam", 4, std::move(pts)};
}

Constellation Constellation::by_name(std::string_view name) {
  if (name == "qpsk") return qpsk();
  if (name == "16qam" || name == "qam16") return qam16();
  throw ConfigError("unknown constellation '" + std::string(name) + "'");
}

std::string_view to_string(SchemeId s) {
  switch (s) {
    case SchemeId::SC: return "SC";
    case SchemeId::OFDM: return "OFDM";
    case SchemeId::OTFS: return "OTFS";
  }
  return "?";
}

SchemeId parse_scheme(std::string_view s) {
  if (s == "SC" || s == "sc") return SchemeId::SC;
  if (s == "OFDM" || s == "ofdm") return SchemeId::OFDM;
  if (s == "OTFS" || s == "otfs") return SchemeId::OTFS;
  throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

SignalDomain data_domain(SchemeId s) {
  switch (s) {
    case SchemeId::SC: return SignalDomain::Time;
    case SchemeId::OFDM: return SignalDomain::Frequency;
    case SchemeId::OTFS: return SignalDomain::DelayDoppler;
  }
  throw ConfigError("unknown scheme");
}

CVector map_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
  const std::size_t bps = c.bits_per_symbol();
  if (bits.size() % bps != 0)
    throw ConfigError("bit count " + std::to_string(bits.size()) + " is not a multiple of " + std::to_string(bps));
  CVector out(static_cast<Eigen::Index>(bits.size() / bps));
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    std::size_t label = 0;
    for (std::size_t b = 0; b < bps; ++b) label = (label << 1) | (bits[static_cast<std::size_t>(k) * bps + b] & 1u);
    out[k] = c.points()[label];
  }
  return out;
}

Bits hard_demap(const CVector& symbols, const Constellation& c) {
  const std::size_t bps = c.bits_per_symbol();
  Bits out(static_cast<std::size_t>(symbols.size()) * bps);
  for (Eigen::Index k = 0; k < symbols.size(); ++k) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t label = 0; label < c.points().size(); ++label) {
      const double d = std::norm(symbols[k] - c.points()[label]);
      if (d < best_d) {
        best_d = d;
        best = label;
      }
    }
    for (std::size_t b = 0; b < bps; ++b)
      out[static_cast<std::size_t>(k) * bps + b] = static_cast<std::uint8_t>((best >> (bps - 1 - b)) & 1u);
  }
  return out;
}

SymbolFrame modulate(SchemeId scheme, const CVector& s, const LayeredFactorization& fact,
                     std::span<const std::size_t> subcarrier_order) {
  if (static_cast<std::size_t>(s.size()) != fact.P())
    throw ConfigError("modulate: " + std::to_string(s.size()) + " symbols for a frame of P=" + std::to_string(fact.P()));

  if (scheme == SchemeId::SC) {
    if (!subcarrier_order.empty()) throw ConfigError("modulate: single carrier has no subcarriers to place");
    return {SignalDomain::Time, s};
  }

  if (subcarrier_order.empty()) {
    if (scheme == SchemeId::OFDM) return {SignalDomain::Time, spectral::unitary_dft(s, spectral::Direction::Inverse)};
    return {SignalDomain::Time, spectral::kron_idft_rows(s, fact)};
  }

  if (subcarrier_order.size() != fact.P()) throw ConfigError("modulate: subcarrier order must have P entries");
  const CVector u = scheme == SchemeId::OTFS ? spectral::otfs_precoder(s, fact) : s;
  CVector placed = CVector::Zero(u.size());
  std::vector<bool> used(fact.P(), false);
  for (std::size_t i = 0; i < fact.P(); ++i) {
    const std::size_t k = subcarrier_order[i];
    if (k >= fact.P() || used[k]) throw ConfigError("modulate: subcarrier order is not a permutation");
    used[k] = true;
    placed[static_cast<Eigen::Index>(k)] = u[static_cast<Eigen::Index>(i)];
  }
  return {SignalDomain::Time, spectral::layered_idft(placed, fact)};
}

}  // namespace ddlab::modem
