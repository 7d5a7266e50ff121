#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "womac/core.hpp"

namespace womac {

struct PredictionRecord {
  std::string task_id;
  std::string expert_id;
  double prediction = 0.0;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct OutcomeRecord {
  std::string task_id;
  double outcome = 0.0;

  friend bool operator==(const OutcomeRecord&, const OutcomeRecord&) = default;
};

/// Long-form records as read from disk, validated but not yet reshaped.
/// Missing predictions are simply absent records.
struct RawDataset {
  std::vector<PredictionRecord> predictions;
  std::vector<OutcomeRecord> outcomes;  // file order
  OutcomeKind kind = OutcomeKind::Binary;
  std::string predictions_source;
  std::string outcomes_source;
};

using ImputedMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Dataset {
  PredictionMatrix reports;
  OutcomeVector outcomes;
  ImputedMask imputed;  // true where a missing cell was filled
};

/// Outcomes are binary when every value is 0 or 1; binary datasets require
/// predictions in [0, 1]. Errors carry the source name and 1-based line.
RawDataset parse_csv(std::istream& predictions, std::istream& outcomes,
                     const std::string& predictions_source = "predictions",
                     const std::string& outcomes_source = "outcomes");

RawDataset load_csv(const std::filesystem::path& predictions, const std::filesystem::path& outcomes);

/// Canonical order: tasks as in the outcomes list, experts lexicographic.
void write_csv(const RawDataset& raw, std::ostream& predictions, std::ostream& outcomes);
void write_csv(const RawDataset& raw, const std::filesystem::path& predictions,
               const std::filesystem::path& outcomes);

/// Long-form view of a complete matrix, e.g. for writing synthetic data.
RawDataset to_raw(const PredictionMatrix& reports, const OutcomeVector& outcomes);

/// Keeps only experts with a prediction on every task.
Dataset filter_complete(const RawDataset& raw);

/// Drops tasks with fewer than `min_task_responses` predictions, then experts
/// answering less than `min_expert_completion` of the surviving tasks. Gaps
/// are filled with the mean outcome over the surviving tasks.
Dataset filter_hfc(const RawDataset& raw, std::size_t min_task_responses = 250,
                   double min_expert_completion = 0.5);

}  // namespace womac
