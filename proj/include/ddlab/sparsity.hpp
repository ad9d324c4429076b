#pragma once

#include <cstdint>
#include <vector>

#include "ddlab/types.hpp"

namespace ddlab::sparsity {

enum class Metric { Lpr, Spr };

struct SparsityRecord {
  int case_id = 0;
  MatrixDomain domain = MatrixDomain::DelayTime;
  Metric metric = Metric::Lpr;
  std::size_t L_c = 0;
  double value = 0.0;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
};

std::string_view to_string(Metric m);

/// Localized power ratio. Per column: the peak-power row q (lowest index on
/// ties), the power inside the circular window q-L_c .. q+L_c over the column
/// power; averaged over all columns. Zero-power columns count as 1.
double lpr(const DomainMatrix& H, std::size_t L_c);

/// Sorted power ratio: like lpr but with the 2L_c+1 strongest entries of
/// each column (lower index first on ties).
double spr(const DomainMatrix& H, std::size_t L_c);

struct RatioProfile {
  std::vector<double> lpr;  // indexed by L_c
  std::vector<double> spr;
};

/// lpr and spr for every L_c in 0..max_L_c in one pass over the columns.
/// Entries agree exactly with lpr(H, L_c) and spr(H, L_c).
RatioProfile ratio_profile(const DomainMatrix& H, std::size_t max_L_c);

/// Keeps each column's lpr window and zeroes everything else.
DomainMatrix truncate_band(const DomainMatrix& H, std::size_t L_c);

/// Keeps each column's 2L_c+1 strongest entries and zeroes everything else.
DomainMatrix truncate_topk(const DomainMatrix& H, std::size_t L_c);

}  // namespace ddlab::sparsity
