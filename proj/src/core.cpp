#include "womac/core.hpp"

#include <charconv>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace womac {
namespace {

std::vector<std::string> default_ids(char prefix, std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

void require_unique(const std::vector<std::string>& ids, std::string_view what) {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw ValidationError(std::string(what) + " id '" + id + "' is not unique");
    }
  }
}

}  // namespace

void require_finite(std::span<const double> values, std::string_view what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + " contains a non-finite value");
  }
}

PredictionMatrix::PredictionMatrix(Matrix values, std::vector<std::string> task_ids,
                                   std::vector<std::string> expert_ids)
    : values_(std::move(values)), task_ids_(std::move(task_ids)), expert_ids_(std::move(expert_ids)) {
  if (values_.rows() < 1) throw ValidationError("prediction matrix needs at least one task");
  if (values_.cols() < 2) throw ValidationError("prediction matrix needs at least two experts");
  require_finite({values_.data(), static_cast<std::size_t>(values_.size())}, "prediction matrix");
  if (task_ids_.empty()) task_ids_ = default_ids('t', tasks());
  if (expert_ids_.empty()) expert_ids_ = default_ids('e', experts());
  if (task_ids_.size() != tasks()) throw DimensionError("task id count does not match row count");
  if (expert_ids_.size() != experts()) throw DimensionError("expert id count does not match column count");
  require_unique(task_ids_, "task");
  require_unique(expert_ids_, "expert");
}

PredictionMatrix PredictionMatrix::select_tasks(std::span<const std::size_t> rows) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= tasks()) throw DimensionError("task index out of range");
    out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
    ids.push_back(task_ids_[rows[r]]);
  }
  return PredictionMatrix(std::move(out), std::move(ids), expert_ids_);
}

PredictionMatrix PredictionMatrix::select_experts(std::span<const std::size_t> cols) const {
  Matrix out(values_.rows(), static_cast<Eigen::Index>(cols.size()));
  std::vector<std::string> ids;
  ids.reserve(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= experts()) throw DimensionError("expert index out of range");
    out.col(static_cast<Eigen::Index>(c)) = values_.col(static_cast<Eigen::Index>(cols[c]));
    ids.push_back(expert_ids_[cols[c]]);
  }
  return PredictionMatrix(std::move(out), task_ids_, std::move(ids));
}

OutcomeVector::OutcomeVector(Vector values, OutcomeKind kind)
    : values_(std::move(values)), kind_(kind) {
  require_finite(span(), "outcome vector");
  if (kind_ == OutcomeKind::Binary) {
    for (double v : span()) {
      if (v != 0.0 && v != 1.0) throw ValidationError("binary outcome must be 0 or 1");
    }
  }
}

OutcomeVector OutcomeVector::infer(Vector values) {
  bool binary = true;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0 && values[i] != 1.0) binary = false;
  }
  return OutcomeVector(std::move(values), binary ? OutcomeKind::Binary : OutcomeKind::Continuous);
}

OutcomeVector OutcomeVector::select(std::span<const std::size_t> rows) const {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw DimensionError("task index out of range");
    out[static_cast<Eigen::Index>(r)] = values_[static_cast<Eigen::Index>(rows[r])];
  }
  return OutcomeVector(std::move(out), kind_);
}

ReferenceMatrix::ReferenceMatrix(Matrix values) : values_(std::move(values)) {
  require_finite({values_.data(), static_cast<std::size_t>(values_.size())}, "reference matrix");
}

ReferenceMatrix ReferenceMatrix::broadcast(const Vector& shared, std::size_t experts) {
  return ReferenceMatrix(shared.replicate(1, static_cast<Eigen::Index>(experts)));
}

std::string_view to_string(MechanismTag tag) {
  switch (tag) {
    case MechanismTag::Standard: return "standard";
    case MechanismTag::Oracular: return "oracular";
    case MechanismTag::WomacTopK: return "womac-topk";
    case MechanismTag::WomacLSQ: return "womac-lsq";
  }
  return "unknown";
}

double sum_squared_error(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size()) throw DimensionError("sum_squared_error: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(ref[i])) {
      throw ValidationError("sum_squared_error: non-finite input");
    }
    const double d = pred[i] - ref[i];
    total += d * d;
  }
  return total;
}

WinnerSelection select_winner(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("select_winner: no scores");
  require_finite(scores, "scores");
  double best = scores[0];
  for (double s : scores) best = s < best ? s : best;
  WinnerSelection out;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] == best) out.tied_winners.push_back(j);
  }
  out.winner = out.tied_winners.front();
  return out;
}

CompetitionResult score_all(const Matrix& reports, const ReferenceMatrix& reference,
                            MechanismTag tag) {
  if (reports.rows() != reference.values().rows() || reports.cols() != reference.values().cols()) {
    throw DimensionError("score_all: reports and reference differ in shape");
  }
  const auto m = static_cast<std::size_t>(reports.rows());
  CompetitionResult result;
  result.mechanism_tag = tag;
  result.scores.resize(static_cast<std::size_t>(reports.cols()));
  for (Eigen::Index j = 0; j < reports.cols(); ++j) {
    result.scores[static_cast<std::size_t>(j)] =
        sum_squared_error({reports.col(j).data(), m}, reference.column(static_cast<std::size_t>(j)));
  }
  auto selection = select_winner(result.scores);
  result.winner = selection.winner;
  result.tied_winners = std::move(selection.tied_winners);
  return result;
}

CompetitionResult score_all(const PredictionMatrix& reports, const ReferenceMatrix& reference,
                            MechanismTag tag) {
  return score_all(reports.values(), reference, tag);
}

std::string format_number(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

}  // namespace womac
