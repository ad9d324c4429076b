#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ddlab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised for invalid sizes, tags, or configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by zero-forcing solves on a numerically singular channel.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// P = M * N split used by the layered IDFT and the OTFS transforms.
/// M is the column-IDFT (delay) size, N the row-IDFT (Doppler) size.
class LayeredFactorization {
 public:
  LayeredFactorization(std::size_t m, std::size_t n) : m_(m), n_(n) {
    if (m == 0 || n == 0) throw ConfigError("factorization sizes must be >= 1");
  }

  /// Builds the split from P and M; fails unless M divides P.
  static LayeredFactorization from_total(std::size_t p, std::size_t m) {
    if (m == 0 || p == 0 || p % m != 0)
      throw ConfigError("M=" + std::to_string(m) + " does not divide P=" + std::to_string(p));
    return {m, p / m};
  }

  std::size_t M() const { return m_; }
  std::size_t N() const { return n_; }
  std::size_t P() const { return m_ * n_; }

  bool operator==(const LayeredFactorization&) const = default;

 private:
  std::size_t m_;
  std::size_t n_;
};

enum class MatrixDomain { DelayTime, FreqTime, FreqDoppler, DelayDopplerOtfs, DelayDopplerDirect };
enum class SignalDomain { Time, Frequency, DelayDoppler };

std::string_view to_string(MatrixDomain d);
std::string_view to_string(SignalDomain d);
MatrixDomain parse_matrix_domain(std::string_view s);
SignalDomain parse_signal_domain(std::string_view s);

/// A P x P channel matrix tagged with the domain pair it maps between.
struct DomainMatrix {
  MatrixDomain domain = MatrixDomain::DelayTime;
  CMatrix entries;
  std::optional<LayeredFactorization> fact;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

/// A length-P signal vector tagged with its domain.
struct SymbolFrame {
  SignalDomain domain = SignalDomain::Time;
  CVector values;
};

/// Signal domain on both sides of a channel matrix in `d`
/// (all supported matrices map a domain onto itself).
SignalDomain signal_domain_of(MatrixDomain d);

}  // namespace ddlab
