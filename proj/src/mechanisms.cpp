#include "womac/mechanisms.hpp"

#include <cmath>
#include <utility>

#include "womac/meta.hpp"

namespace womac {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_same_rows(const PredictionMatrix& reports, std::size_t rows) {
  if (reports.tasks() != rows) throw DimensionError("reference length does not match task count");
}

// Strict-better counts for an (error, index)-sorted order: the position of
// the first member of each tie group.
std::vector<std::size_t> strict_better_counts(std::span<const double> errors,
                                              std::span<const std::size_t> order) {
  std::vector<std::size_t> counts(errors.size());
  std::size_t better = 0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (pos > 0 && errors[order[pos]] != errors[order[pos - 1]]) better = pos;
    counts[order[pos]] = better;
  }
  return counts;
}

void topk_row(const Matrix& w, std::size_t i, std::span<const double> errors,
              std::span<const std::size_t> order, std::span<const std::size_t> counts, double k,
              Matrix& out) {
  const std::size_t n = errors.size();
  const std::size_t pool = n - 1;
  const auto row = static_cast<Eigen::Index>(i);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    std::size_t kept = 0;
    for (std::size_t p : order) {
      if (p == j) continue;
      // Strict-better count within the peer pool, i.e. without expert j.
      const std::size_t better = counts[p] - (errors[j] < errors[p] ? 1 : 0);
      if (kept > 0 && !topk_keeps(better, pool, k)) break;
      sum += w(row, static_cast<Eigen::Index>(p));
      ++kept;
    }
    out(row, static_cast<Eigen::Index>(j)) = sum / static_cast<double>(kept);
  }
}

double least_squares_cell(const Matrix& w, std::span<const double> y, std::size_t i,
                          std::span<const std::size_t> peers, double ridge) {
  const auto m = static_cast<Eigen::Index>(w.rows());
  const auto s = static_cast<Eigen::Index>(peers.size());
  const Eigen::Index fit_rows = m - 1;
  const Eigen::Index penalty_rows = ridge > 0.0 ? s : 0;

  Matrix design = Matrix::Zero(fit_rows + penalty_rows, s + 1);
  Vector target = Vector::Zero(fit_rows + penalty_rows);
  Eigen::Index r = 0;
  for (Eigen::Index task = 0; task < m; ++task) {
    if (task == static_cast<Eigen::Index>(i)) continue;
    design(r, 0) = 1.0;
    for (Eigen::Index c = 0; c < s; ++c) design(r, c + 1) = w(task, static_cast<Eigen::Index>(peers[c]));
    target[r] = y[static_cast<std::size_t>(task)];
    ++r;
  }
  // Ridge as augmented rows; the intercept is not penalized.
  const double root = std::sqrt(ridge);
  for (Eigen::Index c = 0; c < penalty_rows; ++c) design(fit_rows + c, c + 1) = root;

  const Vector beta = design.completeOrthogonalDecomposition().solve(target);
  double prediction = beta[0];
  for (Eigen::Index c = 0; c < s; ++c) {
    prediction += beta[c + 1] * w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(peers[c]));
  }
  return prediction;
}

}  // namespace

CompetitionResult run_shared_reference(const Matrix& reports, const Vector& reference,
                                       MechanismTag tag) {
  if (reports.rows() != reference.size()) throw DimensionError("reference length does not match task count");
  return score_all(reports, ReferenceMatrix::broadcast(reference, static_cast<std::size_t>(reports.cols())), tag);
}

CompetitionResult run_standard(const PredictionMatrix& reports, const OutcomeVector& outcomes) {
  require_same_rows(reports, outcomes.size());
  return run_shared_reference(reports.values(), outcomes.values(), MechanismTag::Standard);
}

CompetitionResult run_oracular(const PredictionMatrix& reports, const OracleVector& theta) {
  require_same_rows(reports, static_cast<std::size_t>(theta.values.size()));
  require_finite({theta.values.data(), static_cast<std::size_t>(theta.values.size())}, "oracle vector");
  return run_shared_reference(reports.values(), theta.values, MechanismTag::Oracular);
}

MechanismTag tag_of(const WomacConfig& config) {
  return std::holds_alternative<TopKAverage>(config.meta_learner) ? MechanismTag::WomacTopK
                                                                  : MechanismTag::WomacLSQ;
}

void validate(const WomacConfig& config, std::size_t tasks, std::size_t experts) {
  if (tasks < 2) throw ValidationError("womac needs at least two tasks");
  std::visit(overloaded{
                 [&](const TopKAverage& topk) {
                   require_valid_k(topk.k);
                   if (experts < 3) throw ValidationError("womac top-k needs at least three experts");
                 },
                 [&](const LeastSquares& lsq) {
                   if (lsq.screen_size < 1 || lsq.screen_size + 1 > experts) {
                     throw ValidationError("screen size must lie in [1, n-1]");
                   }
                   if (!(lsq.ridge >= 0.0) || !std::isfinite(lsq.ridge)) {
                     throw ValidationError("ridge must be a nonnegative finite number");
                   }
                 },
             },
             config.meta_learner);
}

ReferenceMatrix womac_reference(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                                const WomacConfig& config) {
  const std::size_t m = reports.tasks();
  const std::size_t n = reports.experts();
  require_same_rows(reports, outcomes.size());
  validate(config, m, n);

  const Matrix& w = reports.values();
  const Matrix loo = loo_sse(w, outcomes.span());
  Matrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));

  if (const auto* topk = std::get_if<TopKAverage>(&config.meta_learner)) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> errors(n);
      for (std::size_t l = 0; l < n; ++l) errors[l] = loo(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
      const auto order = rank_by_error(errors);
      const auto counts = strict_better_counts(errors, order);
      topk_row(w, i, errors, order, counts, topk->k, out);
    }
  } else {
    const auto& lsq = std::get<LeastSquares>(config.meta_learner);
    std::vector<std::vector<std::size_t>> orders(m);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> errors(n);
      for (std::size_t l = 0; l < n; ++l) errors[l] = loo(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
      orders[i] = rank_by_error(errors);
    }
    const auto cells = static_cast<std::ptrdiff_t>(m * n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t cell = 0; cell < cells; ++cell) {
      const auto i = static_cast<std::size_t>(cell) / n;
      const auto j = static_cast<std::size_t>(cell) % n;
      std::vector<std::size_t> peers;
      peers.reserve(lsq.screen_size);
      for (std::size_t p : orders[i]) {
        if (p == j) continue;
        peers.push_back(p);
        if (peers.size() == lsq.screen_size) break;
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          least_squares_cell(w, outcomes.span(), i, peers, lsq.ridge);
    }
  }
  return ReferenceMatrix(std::move(out));
}

WomacRun run_womac(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                   const WomacConfig& config) {
  auto reference = womac_reference(reports, outcomes, config);
  auto result = score_all(reports, reference, tag_of(config));
  return {std::move(result), std::move(reference)};
}

std::vector<double> womac_score_only(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                                     const WomacConfig& config) {
  return run_womac(reports, outcomes, config).result.scores;
}

}  // namespace womac
