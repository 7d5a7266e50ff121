#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "womac/core.hpp"
#include "womac/mechanisms.hpp"
#include "womac/rng.hpp"

namespace womac {

struct FixedTheta {
  Vector values;
};
struct GaussianPrior {
  double mean = 0.0;
  double sd = 1.0;
};
using ThetaPrior = std::variant<FixedTheta, GaussianPrior>;

/// y_i ~ N(theta_i, sd^2).
struct GaussianOutcome {
  double sd = 1.0;
};
/// y_i ~ Bernoulli(sigmoid(theta_i)). Reports and references are mapped to
/// probabilities through the sigmoid before scoring.
struct BernoulliLogistic {};
using OutcomeModel = std::variant<GaussianOutcome, BernoulliLogistic>;

struct WorldConfig {
  std::size_t tasks = 1;
  ThetaPrior theta_prior = GaussianPrior{};
  OutcomeModel outcome_model = GaussianOutcome{};
  std::vector<double> expert_sds;  // tau_j, one per expert
};

void validate(const WorldConfig& config);

/// One draw: theta from the prior, X_ij ~ N(theta_i, tau_j^2) independently,
/// y from the outcome model. X and theta stay on the latent scale.
struct World {
  OracleVector theta;
  PredictionMatrix latent;
  OutcomeVector outcomes;
};

World sample_world(const WorldConfig& config, std::uint64_t seed);
World sample_world(const WorldConfig& config, Rng& rng);

/// Identity for Gaussian outcomes, elementwise sigmoid for Bernoulli ones.
double to_report_scale(const OutcomeModel& model, double latent);
Matrix to_report_scale(const OutcomeModel& model, const Matrix& latent);
Vector to_report_scale(const OutcomeModel& model, const Vector& latent);

/// Noise applied to theta to form the reference estimate theta^s.
struct ReferenceNoiseModel {
  enum class Kind { Exact, GaussianNoise };
  Kind kind = Kind::Exact;
  double sd = 0.0;

  static ReferenceNoiseModel exact() { return {}; }
  static ReferenceNoiseModel gaussian(double sd) { return {Kind::GaussianNoise, sd}; }
};

struct Truthful {};
/// w = x + delta * direction on every task.
struct Outflank {
  double delta = 0.0;
  int direction = 1;
};
struct Shift {
  Vector offsets;
};
using DeviationStrategy = std::variant<Truthful, Outflank, Shift>;

enum class SimMechanism { Standard, Oracular, Womac };

struct MechanismChoice {
  SimMechanism kind = SimMechanism::Standard;
  WomacConfig womac{};  // used only by SimMechanism::Womac
};

struct WinProbEstimate {
  std::vector<double> per_expert_freq;
  std::vector<std::uint64_t> wins;
  std::size_t replicates = 0;
  std::vector<double> ci_halfwidth;  // 95% normal approximation
};

/// Normal-approximation half width z * sqrt(p (1 - p) / replicates).
double ci_halfwidth(double freq, std::size_t replicates, double z = 1.959963984540054);

/// Monte Carlo win frequencies. Replicate r uses the stream
/// derive_seed(seed, r) for the world and then the reference noise.
/// Replicates run in parallel; the tally is an integer count per expert.
WinProbEstimate estimate_win_prob(const WorldConfig& config, const MechanismChoice& mechanism,
                                  const ReferenceNoiseModel& reference_noise,
                                  const std::vector<DeviationStrategy>& strategies,
                                  std::size_t replicates, std::uint64_t seed);

struct EfficiencyRow {
  std::size_t tasks = 0;
  double freq_a = 0.0;
  double ci_a = 0.0;
  double freq_b = 0.0;
  double ci_b = 0.0;
};

/// Best-expert win frequency against references drawn from two noise models,
/// for each task count in `task_grid`. The best expert is the unique minimum
/// of expert_sds. Both references at one grid point share the world draws.
std::vector<EfficiencyRow> efficiency_curve(const WorldConfig& config,
                                            const ReferenceNoiseModel& noise_a,
                                            const ReferenceNoiseModel& noise_b,
                                            const std::vector<std::size_t>& task_grid,
                                            std::size_t replicates, std::uint64_t seed);

std::size_t best_expert(const WorldConfig& config);

/// n expert sds drawn log-uniformly from [lo, hi].
std::vector<double> log_uniform_sds(std::size_t n, double lo, double hi, std::uint64_t seed);

}  // namespace womac
