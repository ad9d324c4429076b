#include "ddlab/types.hpp"

namespace ddlab {

std::string_view to_string(MatrixDomain d) {
  switch (d) {
    case MatrixDomain::DelayTime: return "dt";
    case MatrixDomain::FreqTime: return "ft";
    case MatrixDomain::FreqDoppler: return "fD";
    case MatrixDomain::DelayDopplerOtfs: return "dD_otfs";
    case MatrixDomain::DelayDopplerDirect: return "dD_direct";
  }
  return "?";
}

std::string_view to_string(SignalDomain d) {
  switch (d) {
    case SignalDomain::Time: return "time";
    case SignalDomain::Frequency: return "frequency";
    case SignalDomain::DelayDoppler: return "delayDoppler";
  }
  return "?";
}

MatrixDomain parse_matrix_domain(std::string_view s) {
  if (s == "dt" || s == "td") return MatrixDomain::DelayTime;
  if (s == "ft") return MatrixDomain::FreqTime;
  if (s == "fD" || s == "fd") return MatrixDomain::FreqDoppler;
  if (s == "dD_otfs" || s == "dD" || s == "dd") return MatrixDomain::DelayDopplerOtfs;
  if (s == "dD_direct") return MatrixDomain::DelayDopplerDirect;
  throw ConfigError("unknown matrix domain '" + std::string(s) + "'");
}

SignalDomain parse_signal_domain(std::string_view s) {
  if (s == "time" || s == "t") return SignalDomain::Time;
  if (s == "frequency" || s == "freq" || s == "f") return SignalDomain::Frequency;
  if (s == "delayDoppler" || s == "dd" || s == "dD") return SignalDomain::DelayDoppler;
  throw ConfigError("unknown signal domain '" + std::string(s) + "'");
}

SignalDomain signal_domain_of(MatrixDomain d) {
  switch (d) {
    case MatrixDomain::DelayTime: return SignalDomain::Time;
    case MatrixDomain::FreqDoppler: return SignalDomain::Frequency;
    case MatrixDomain::DelayDopplerOtfs: return SignalDomain::DelayDoppler;
    default:
      throw ConfigError("domain " + std::string(to_string(d)) + " has no single signal domain");
  }
}

}  // namespace ddlab
