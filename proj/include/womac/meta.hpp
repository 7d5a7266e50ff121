#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "womac/core.hpp"

namespace womac {

/// Uniform weights over the peers kept by the top-k rule.
struct WeightAssignment {
  std::vector<std::size_t> selected_peers;  // ascending expert index
  double weight_per_peer = 0.0;
  std::optional<std::size_t> excluded_expert;
};

/// Top-k peer selection. `mses` holds one error per expert; the entry at
/// `excluded` (if any) is ignored and the pool is everyone else. Peer p is
/// kept iff |{l in pool : mses[l] < mses[p]}| / |pool| < k. The best-ranked
/// peer is always kept.
WeightAssignment topk_weights(std::span<const double> mses, double k,
                              std::optional<std::size_t> excluded = std::nullopt);

/// The keep predicate of the top-k rule, shared by every caller so the
/// comparison is evaluated identically everywhere.
inline bool topk_keeps(std::size_t strictly_better, std::size_t pool, double k) {
  return static_cast<double>(strictly_better) / static_cast<double>(pool) < k;
}

void require_valid_k(double k);

/// Leave-one-task-out squared error: out(i, l) = sum over i' != i of
/// (y_i' - W(i', l))^2, accumulated in task order.
Matrix loo_sse(const Matrix& reports, std::span<const double> outcomes);

/// Expert indices ordered by (error, index).
std::vector<std::size_t> rank_by_error(std::span<const double> errors);

struct KTuneReport {
  std::vector<double> k_grid;
  std::vector<double> objective;
  double best_k = 0.0;
};

std::vector<double> default_k_grid();

/// Pooled leave-one-task-out tuning of k: for each task i the aggregate is
/// the top-k average of all experts ranked on the other tasks; the objective
/// is the summed squared error of those aggregates against the outcomes.
KTuneReport tune_k(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                   std::span<const double> k_grid);

}  // namespace womac
