#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "womac/core.hpp"

namespace womac {

/// Simple average of the peers ranked in the top fraction k.
struct TopKAverage {
  double k = 0.05;
};

/// Ridge least squares with intercept on the `screen_size` peers that score
/// best against the held-in outcomes. ridge = 0 yields the minimum-norm fit.
struct LeastSquares {
  std::size_t screen_size = 5;
  double ridge = 0.0;
};

using MetaLearner = std::variant<TopKAverage, LeastSquares>;

struct WomacConfig {
  MetaLearner meta_learner = TopKAverage{};
};

/// Ground truth per task.
struct OracleVector {
  Vector values;
};

struct WomacRun {
  CompetitionResult result;
  ReferenceMatrix reference;
};

/// Scores every expert against the realized outcomes.
CompetitionResult run_standard(const PredictionMatrix& reports, const OutcomeVector& outcomes);

/// Scores every expert against the ground truth.
CompetitionResult run_oracular(const PredictionMatrix& reports, const OracleVector& theta);

/// Scores every expert against one shared reference vector.
CompetitionResult run_shared_reference(const Matrix& reports, const Vector& reference,
                                       MechanismTag tag);

/// Jackknifed reference solutions. Cell (i, j) is fitted on every task but i
/// and every expert but j, then evaluated on the peers' reports for task i.
/// Rows are processed in parallel; each cell writes its own slot.
ReferenceMatrix womac_reference(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                                const WomacConfig& config);

WomacRun run_womac(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                   const WomacConfig& config);

std::vector<double> womac_score_only(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                                     const WomacConfig& config);

MechanismTag tag_of(const WomacConfig& config);

/// Throws ValidationError when the configuration cannot run on an m x n matrix.
void validate(const WomacConfig& config, std::size_t tasks, std::size_t experts);

}  // namespace womac
