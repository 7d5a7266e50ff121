#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "womac/error.hpp"

namespace womac {

// Column-major: expert j's reports are contiguous in column j.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Expert reports, one row per task and one column per expert.
class PredictionMatrix {
 public:
  /// Ids default to "t0", "t1", ... and "e0", "e1", ... when left empty.
  explicit PredictionMatrix(Matrix values,
                            std::vector<std::string> task_ids = {},
                            std::vector<std::string> expert_ids = {});

  const Matrix& values() const noexcept { return values_; }
  std::size_t tasks() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t experts() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const std::vector<std::string>& task_ids() const noexcept { return task_ids_; }
  const std::vector<std::string>& expert_ids() const noexcept { return expert_ids_; }

  std::span<const double> column(std::size_t j) const {
    return {values_.col(static_cast<Eigen::Index>(j)).data(), tasks()};
  }

  /// Rows in the order given; ids follow.
  PredictionMatrix select_tasks(std::span<const std::size_t> rows) const;
  /// Columns in the order given; ids follow.
  PredictionMatrix select_experts(std::span<const std::size_t> cols) const;

 private:
  Matrix values_;
  std::vector<std::string> task_ids_;
  std::vector<std::string> expert_ids_;
};

enum class OutcomeKind { Binary, Continuous };

class OutcomeVector {
 public:
  OutcomeVector(Vector values, OutcomeKind kind);

  /// Binary when every entry is exactly 0 or 1, otherwise continuous.
  static OutcomeVector infer(Vector values);

  const Vector& values() const noexcept { return values_; }
  OutcomeKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  std::span<const double> span() const { return {values_.data(), size()}; }

  OutcomeVector select(std::span<const std::size_t> rows) const;

 private:
  Vector values_;
  OutcomeKind kind_;
};

/// Per-expert, per-task reference solutions t_ij.
class ReferenceMatrix {
 public:
  explicit ReferenceMatrix(Matrix values);

  /// Every column equal to `shared`.
  static ReferenceMatrix broadcast(const Vector& shared, std::size_t experts);

  const Matrix& values() const noexcept { return values_; }
  std::size_t tasks() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t experts() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  std::span<const double> column(std::size_t j) const {
    return {values_.col(static_cast<Eigen::Index>(j)).data(), tasks()};
  }

 private:
  Matrix values_;
};

enum class MechanismTag { Standard, Oracular, WomacTopK, WomacLSQ };

std::string_view to_string(MechanismTag tag);

struct WinnerSelection {
  std::size_t winner = 0;
  std::vector<std::size_t> tied_winners;
};

struct CompetitionResult {
  std::vector<double> scores;
  std::size_t winner = 0;
  std::vector<std::size_t> tied_winners;
  MechanismTag mechanism_tag = MechanismTag::Standard;
};

/// Sum over i of (pred_i - ref_i)^2, accumulated in index order.
double sum_squared_error(std::span<const double> pred, std::span<const double> ref);

/// Lowest index attaining the minimum wins; ties use exact equality.
WinnerSelection select_winner(std::span<const double> scores);

/// Scores every expert column of `reports` against the matching column of
/// `reference` and selects the winner.
CompetitionResult score_all(const Matrix& reports, const ReferenceMatrix& reference,
                            MechanismTag tag = MechanismTag::Standard);
CompetitionResult score_all(const PredictionMatrix& reports, const ReferenceMatrix& reference,
                            MechanismTag tag = MechanismTag::Standard);

/// Throws ValidationError unless every entry is finite.
void require_finite(std::span<const double> values, std::string_view what);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

}  // namespace womac
