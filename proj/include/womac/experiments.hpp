#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "womac/core.hpp"

namespace womac {

struct TunedInSample {
  std::vector<double> grid;
};
struct FixedK {
  double k = 0.05;
};
using KPolicy = std::variant<TunedInSample, FixedK>;

struct ExperimentConfig {
  std::vector<std::size_t> m_train_grid{5, 10, 15, 20, 25, 30, 35, 40};
  std::size_t n_subsamples = 150;
  std::size_t m_test = 10;
  KPolicy k_policy = TunedInSample{};  // empty grid means the default grid
  std::optional<std::size_t> expert_subsample;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending, disjoint from train
};

/// `count` independent splits drawn without replacement; split s uses the
/// stream derive_seed(seed, s).
std::vector<Split> make_splits(std::size_t m_total, std::size_t m_train, std::size_t m_test,
                               std::size_t count, std::uint64_t seed);

/// Per-expert sums of squared errors for one split.
struct SplitScores {
  std::vector<double> womac_in;
  std::vector<double> mse_in;
  std::vector<double> mse_out;
  double k_used = 0.0;
};

SplitScores score_split(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                        const Split& split, const KPolicy& k_policy);

/// Sample Pearson correlation; nullopt when either input has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of mid-ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based), ties sharing the mean of their positions.
std::vector<double> mid_ranks(std::span<const double> values);

struct CorrelationSummary {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  std::size_t count = 0;
  std::size_t missing = 0;
};

/// NaN marks a missing (zero-variance) correlation.
struct SplitCorrelations {
  double pearson_womac = 0.0;
  double pearson_mse = 0.0;
  double spearman_womac = 0.0;
  double spearman_mse = 0.0;
  double k_used = 0.0;
};

struct KDistribution {
  double p05 = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double p95 = 0.0;
};

struct MTrainReport {
  std::size_t m_train = 0;
  CorrelationSummary pearson_womac;
  CorrelationSummary pearson_mse;
  CorrelationSummary pearson_gap;
  CorrelationSummary spearman_womac;
  CorrelationSummary spearman_mse;
  CorrelationSummary spearman_gap;
  KDistribution k_distribution;
  std::vector<SplitCorrelations> splits;
};

struct CorrelationReport {
  std::size_t tasks = 0;
  std::size_t experts = 0;
  std::vector<MTrainReport> rows;
};

CorrelationSummary summarize(std::span<const double> values);

CorrelationReport run_correlation_experiment(const PredictionMatrix& reports,
                                             const OutcomeVector& outcomes,
                                             const ExperimentConfig& config);

/// One row per m_train x correlation kind x score kind.
std::string to_csv(const CorrelationReport& report);
nlohmann::ordered_json to_json(const CorrelationReport& report);

}  // namespace womac
