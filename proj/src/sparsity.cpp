#include "ddlab/sparsity.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace ddlab::sparsity {

namespace {

void check_window(const DomainMatrix& H, std::size_t L_c) {
  if (H.entries.rows() != H.entries.cols()) throw ConfigError("channel matrix must be square");
  if (2 * L_c + 1 > H.size())
    throw ConfigError("window 2*L_c+1 = " + std::to_string(2 * L_c + 1) + " exceeds P = " + std::to_string(H.size()));
}

struct Column {
  std::vector<double> pw;
  double total = 0.0;
  std::size_t peak = 0;

  Column(const CMatrix& A, Eigen::Index c) : pw(static_cast<std::size_t>(A.rows())) {
    for (Eigen::Index r = 0; r < A.rows(); ++r) pw[static_cast<std::size_t>(r)] = std::norm(A(r, c));
    total = std::accumulate(pw.begin(), pw.end(), 0.0);
    peak = static_cast<std::size_t>(std::max_element(pw.begin(), pw.end()) - pw.begin());
  }

  bool stronger(std::size_t a, std::size_t b) const { return pw[a] > pw[b] || (pw[a] == pw[b] && a < b); }

  // Circular window around the peak, ascending row order.
  std::vector<std::size_t> band_rows(std::size_t L_c) const {
    const std::size_t P = pw.size();
    std::vector<std::size_t> rows(2 * L_c + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = (peak + P - L_c + i) % P;
    std::sort(rows.begin(), rows.end());
    return rows;
  }

  // 2L_c+1 strongest rows, ascending row order.
  std::vector<std::size_t> topk_rows(std::size_t L_c) const {
    std::vector<std::size_t> idx(pw.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto k = static_cast<std::ptrdiff_t>(2 * L_c + 1);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [this](auto a, auto b) { return stronger(a, b); });
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
  }

  // Summing selections in ascending row order makes equal selections give
  // bit-identical ratios whichever metric picked them.
  double ratio(const std::vector<std::size_t>& rows) const {
    if (total == 0.0) return 1.0;
    double kept = 0.0;
    for (auto r : rows) kept += pw[r];
    return std::min(kept / total, 1.0);
  }
};

template <typename Select>
double average_ratio(const DomainMatrix& H, std::size_t L_c, Select&& select) {
  check_window(H, L_c);
  double acc = 0.0;
  for (Eigen::Index c = 0; c < H.entries.cols(); ++c) {
    const Column col(H.entries, c);
    acc += col.ratio(select(col, L_c));
  }
  return acc / static_cast<double>(H.entries.cols());
}

template <typename Select>
DomainMatrix truncate(const DomainMatrix& H, std::size_t L_c, Select&& select) {
  check_window(H, L_c);
  DomainMatrix out{H.domain, CMatrix::Zero(H.entries.rows(), H.entries.cols()), H.fact};
  for (Eigen::Index c = 0; c < H.entries.cols(); ++c) {
    const Column col(H.entries, c);
    for (auto r : select(col, L_c)) {
      const auto row = static_cast<Eigen::Index>(r);
      out.entries(row, c) = H.entries(row, c);
    }
  }
  return out;
}

auto band = [](const Column& col, std::size_t L_c) { return col.band_rows(L_c); };
auto topk = [](const Column& col, std::size_t L_c) { return col.topk_rows(L_c); };

}  // namespace

std::string_view to_string(Metric m) { return m == Metric::Lpr ? "LPR" : "SPR"; }

double lpr(const DomainMatrix& H, std::size_t L_c) { return average_ratio(H, L_c, band); }
double spr(const DomainMatrix& H, std::size_t L_c) { return average_ratio(H, L_c, topk); }

RatioProfile ratio_profile(const DomainMatrix& H, std::size_t max_L_c) {
  check_window(H, max_L_c);
  RatioProfile out{std::vector<double>(max_L_c + 1, 0.0), std::vector<double>(max_L_c + 1, 0.0)};
  std::vector<std::size_t> order(H.size());
  for (Eigen::Index c = 0; c < H.entries.cols(); ++c) {
    const Column col(H.entries, c);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto k_max = static_cast<std::ptrdiff_t>(2 * max_L_c + 1);
    std::partial_sort(order.begin(), order.begin() + k_max, order.end(),
                      [&col](auto a, auto b) { return col.stronger(a, b); });
    for (std::size_t L_c = 0; L_c <= max_L_c; ++L_c) {
      out.lpr[L_c] += col.ratio(col.band_rows(L_c));
      std::vector<std::size_t> top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(2 * L_c + 1));
      std::sort(top.begin(), top.end());
      out.spr[L_c] += col.ratio(top);
    }
  }
  const double cols = static_cast<double>(H.entries.cols());
  for (auto& v : out.lpr) v /= cols;
  for (auto& v : out.spr) v /= cols;
  return out;
}

DomainMatrix truncate_band(const DomainMatrix& H, std::size_t L_c) { return truncate(H, L_c, band); }
DomainMatrix truncate_topk(const DomainMatrix& H, std::size_t L_c) { return truncate(H, L_c, topk); }

}  // namespace ddlab::sparsity
