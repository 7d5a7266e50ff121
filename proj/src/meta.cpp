#include "womac/meta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace womac {

void require_valid_k(double k) {
  if (!(k > 0.0 && k <= 1.0)) throw ValidationError("k must lie in (0, 1]");
}

WeightAssignment topk_weights(std::span<const double> mses, double k,
                              std::optional<std::size_t> excluded) {
  require_valid_k(k);
  require_finite(mses, "peer errors");
  if (excluded && *excluded >= mses.size()) throw DimensionError("excluded expert out of range");
  const std::size_t pool = mses.size() - (excluded ? 1 : 0);
  if (pool == 0) throw ValidationError("top-k selection needs at least one peer");

  WeightAssignment out;
  out.excluded_expert = excluded;
  std::size_t best = mses.size();
  for (std::size_t p = 0; p < mses.size(); ++p) {
    if (excluded && p == *excluded) continue;
    if (best == mses.size() || mses[p] < mses[best]) best = p;
    std::size_t better = 0;
    for (std::size_t l = 0; l < mses.size(); ++l) {
      if (excluded && l == *excluded) continue;
      if (mses[l] < mses[p]) ++better;
    }
    if (topk_keeps(better, pool, k)) out.selected_peers.push_back(p);
  }
  if (out.selected_peers.empty()) out.selected_peers.push_back(best);
  out.weight_per_peer = 1.0 / static_cast<double>(out.selected_peers.size());
  return out;
}

Matrix loo_sse(const Matrix& reports, std::span<const double> outcomes) {
  const Eigen::Index m = reports.rows();
  const Eigen::Index n = reports.cols();
  if (static_cast<std::size_t>(m) != outcomes.size()) {
    throw DimensionError("loo_sse: outcome length does not match task count");
  }
  Matrix out(m, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index l = 0; l < n; ++l) {
    const double* w = reports.col(l).data();
    for (Eigen::Index i = 0; i < m; ++i) {
      double total = 0.0;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (r == i) continue;
        const double d = outcomes[static_cast<std::size_t>(r)] - w[r];
        total += d * d;
      }
      out(i, l) = total;
    }
  }
  return out;
}

std::vector<std::size_t> rank_by_error(std::span<const double> errors) {
  std::vector<std::size_t> order(errors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return errors[a] < errors[b]; });
  return order;
}

std::vector<double> default_k_grid() { return {0.01, 0.02, 0.05, 0.10, 0.20, 0.30, 0.50, 1.00}; }

KTuneReport tune_k(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                   std::span<const double> k_grid) {
  if (k_grid.empty()) throw ValidationError("tune_k: empty k grid");
  for (double k : k_grid) require_valid_k(k);
  const std::size_t m = reports.tasks();
  const std::size_t n = reports.experts();
  if (outcomes.size() != m) throw DimensionError("tune_k: outcome length does not match task count");
  if (m < 2) throw ValidationError("tune_k needs at least two tasks");

  const Matrix& w = reports.values();
  const Matrix loo = loo_sse(w, outcomes.span());
  const std::size_t grid = k_grid.size();
  std::vector<double> aggregates(m * grid);

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> errors(n);
    for (std::size_t l = 0; l < n; ++l) errors[l] = loo(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
    const auto order = rank_by_error(errors);
    for (std::size_t g = 0; g < grid; ++g) {
      double sum = 0.0;
      std::size_t kept = 0;
      std::size_t better = 0;
      for (std::size_t pos = 0; pos < n; ++pos) {
        if (pos > 0 && errors[order[pos]] != errors[order[pos - 1]]) better = pos;
        if (!topk_keeps(better, n, k_grid[g]) && kept > 0) break;
        sum += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(order[pos]));
        ++kept;
      }
      aggregates[i * grid + g] = sum / static_cast<double>(kept);
    }
  }

  KTuneReport report;
  report.k_grid.assign(k_grid.begin(), k_grid.end());
  report.objective.assign(grid, 0.0);
  for (std::size_t g = 0; g < grid; ++g) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = outcomes.values()[static_cast<Eigen::Index>(i)] - aggregates[i * grid + g];
      total += d * d;
    }
    report.objective[g] = total;
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid; ++g) {
    if (report.objective[g] < report.objective[best] ||
        (report.objective[g] == report.objective[best] && report.k_grid[g] < report.k_grid[best])) {
      best = g;
    }
  }
  report.best_k = report.k_grid[best];
  return report;
}

}  // namespace womac
