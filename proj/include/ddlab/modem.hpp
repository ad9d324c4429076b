#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddlab/types.hpp"

namespace ddlab::modem {

using Bits = std::vector<std::uint8_t>;

/// Gray-labelled unit-average-power constellation. points[label] is the
/// symbol for `label`, whose bits are read MSB first.
class Constellation {
 public:
  static Constellation qpsk();
  static Constellation qam16();
  static Constellation by_name(std::string_view name);

  const std::string& name() const { return name_; }
  std::size_t bits_per_symbol() const { return bits_per_symbol_; }
  const std::vector<Complex>& points() const { return points_; }

 private:
  Constellation(std::string name, std::size_t bps, std::vector<Complex> points)
      : name_(std::move(name)), bits_per_symbol_(bps), points_(std::move(points)) {}

  std::string name_;
  std::size_t bits_per_symbol_;
  std::vector<Complex> points_;
};

enum class SchemeId { SC, OFDM, OTFS };

std::string_view to_string(SchemeId s);
SchemeId parse_scheme(std::string_view s);

/// Domain the data symbols of a scheme live in.
SignalDomain data_domain(SchemeId s);

CVector map_bits(std::span<const std::uint8_t> bits, const Constellation& c);

/// Nearest-point decisions; ties go to the lower label.
Bits hard_demap(const CVector& symbols, const Constellation& c);

/// Time-domain frame for data symbols s:
///   SC   x = s
///   OFDM x = F^H s
///   OTFS x = (F_N^H kron I_M) s
/// subcarrier_order, when non-empty, places frequency-domain entry i on
/// subcarrier subcarrier_order[i] before the IDFT (OFDM and OTFS only; OTFS
/// then runs through the explicit precoder).
SymbolFrame modulate(SchemeId scheme, const CVector& s, const LayeredFactorization& fact,
                     std::span<const std::size_t> subcarrier_order = {});

}  // namespace ddlab::modem
