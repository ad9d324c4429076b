#pragma once

#include "ddlab/channel.hpp"
#include "ddlab/types.hpp"

namespace ddlab::domains {

/// H_ft = F H_dt.
DomainMatrix to_ft(const DomainMatrix& H);

/// H_fD = F H_dt F^H.
DomainMatrix to_fD(const DomainMatrix& H);

/// H_dD = (F_N kron I_M) H_dt (F_N^H kron I_M).
DomainMatrix to_dD_otfs(const DomainMatrix& H, const LayeredFactorization& fact);

/// F^H H_fD F. Kept only as the non-sparse counterexample to the OTFS domain.
DomainMatrix to_dD_direct(const DomainMatrix& H_fD);

/// Builds the representation of H_dt in `target`. dD_direct goes through fD.
DomainMatrix to_domain(const DomainMatrix& H_dt, MatrixDomain target, const std::optional<LayeredFactorization>& fact);

/// Analytic frequency-Doppler matrix of a path set,
///   (H_fD)_{m,n} = sum_l h_l g2(m - n - nu_l) exp(-j 2 pi n tau_l / P),
/// where g2(x) = (1/P) sum_p exp(-j 2 pi p x / P) = conj(dirichlet(x, P)) is
/// the IDFT-side kernel. Cross-check for to_fD only.
DomainMatrix fD_closed_form(const channel::PathSet& paths, std::size_t P);

/// Converts a signal frame between time, frequency and delay-Doppler.
/// fact is required whenever delay-Doppler is on either side.
SymbolFrame convert_frame(const SymbolFrame& v, SignalDomain target, const std::optional<LayeredFactorization>& fact);

/// Sends a unit impulse at probe_index of input_domain through H_dt, converts
/// the received time vector to observe_domain and returns the magnitudes of
/// its column-wise M x N view.
RMatrix impulse_pattern(const channel::PathSet& paths, SignalDomain input_domain, std::size_t probe_index,
                        const LayeredFactorization& fact, SignalDomain observe_domain);

inline RMatrix impulse_pattern(const channel::PathSet& paths, SignalDomain input_domain, std::size_t probe_index,
                               const LayeredFactorization& fact) {
  return impulse_pattern(paths, input_domain, probe_index, fact, input_domain);
}

}  // namespace ddlab::domains
