#include "womac/sim.hpp"

#include "womac/parallel.hpp"

#include <cmath>
#include <string>

namespace womac {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive and finite");
}

void apply_strategy(const DeviationStrategy& strategy, Eigen::Ref<Vector> column) {
  std::visit(overloaded{
                 [](const Truthful&) {},
                 [&](const Outflank& o) { column.array() += o.delta * static_cast<double>(o.direction); },
                 [&](const Shift& s) {
                   if (s.offsets.size() != column.size()) throw DimensionError("shift length does not match task count");
                   column += s.offsets;
                 },
             },
             strategy);
}

void validate_strategy(const DeviationStrategy& strategy) {
  std::visit(overloaded{
                 [](const Truthful&) {},
                 [](const Outflank& o) {
                   if (!std::isfinite(o.delta)) throw ValidationError("outflank offset must be finite");
                   if (o.direction != 1 && o.direction != -1) throw ValidationError("outflank direction must be +1 or -1");
                 },
                 [](const Shift& s) {
                   require_finite({s.offsets.data(), static_cast<std::size_t>(s.offsets.size())}, "shift");
                 },
             },
             strategy);
}

}  // namespace

void validate(const WorldConfig& config) {
  if (config.tasks < 1) throw ValidationError("world needs at least one task");
  if (config.expert_sds.size() < 2) throw ValidationError("world needs at least two experts");
  for (double sd : config.expert_sds) require_positive(sd, "expert sd");
  std::visit(overloaded{
                 [&](const FixedTheta& f) {
                   if (static_cast<std::size_t>(f.values.size()) != config.tasks) {
                     throw DimensionError("fixed theta length does not match task count");
                   }
                   require_finite({f.values.data(), config.tasks}, "fixed theta");
                 },
                 [](const GaussianPrior& g) {
                   if (!std::isfinite(g.mean)) throw ValidationError("prior mean must be finite");
                   require_positive(g.sd, "prior sd");
                 },
             },
             config.theta_prior);
  if (const auto* g = std::get_if<GaussianOutcome>(&config.outcome_model)) require_positive(g->sd, "outcome sd");
}

World sample_world(const WorldConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return sample_world(config, rng);
}

World sample_world(const WorldConfig& config, Rng& rng) {
  validate(config);
  const auto m = static_cast<Eigen::Index>(config.tasks);
  const auto n = static_cast<Eigen::Index>(config.expert_sds.size());
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector theta(m);
  std::visit(overloaded{
                 [&](const FixedTheta& f) { theta = f.values; },
                 [&](const GaussianPrior& g) {
                   for (Eigen::Index i = 0; i < m; ++i) theta[i] = g.mean + g.sd * normal(rng);
                 },
             },
             config.theta_prior);

  Matrix x(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double tau = config.expert_sds[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < m; ++i) x(i, j) = theta[i] + tau * normal(rng);
  }

  Vector y(m);
  OutcomeKind kind = OutcomeKind::Continuous;
  std::visit(overloaded{
                 [&](const GaussianOutcome& g) {
                   for (Eigen::Index i = 0; i < m; ++i) y[i] = theta[i] + g.sd * normal(rng);
                 },
                 [&](const BernoulliLogistic&) {
                   kind = OutcomeKind::Binary;
                   std::uniform_real_distribution<double> unit(0.0, 1.0);
                   for (Eigen::Index i = 0; i < m; ++i) y[i] = unit(rng) < sigmoid(theta[i]) ? 1.0 : 0.0;
                 },
             },
             config.outcome_model);

  return World{OracleVector{std::move(theta)}, PredictionMatrix(std::move(x)), OutcomeVector(std::move(y), kind)};
}

double to_report_scale(const OutcomeModel& model, double latent) {
  return std::holds_alternative<BernoulliLogistic>(model) ? sigmoid(latent) : latent;
}

Matrix to_report_scale(const OutcomeModel& model, const Matrix& latent) {
  if (!std::holds_alternative<BernoulliLogistic>(model)) return latent;
  return latent.unaryExpr([](double v) { return sigmoid(v); });
}

Vector to_report_scale(const OutcomeModel& model, const Vector& latent) {
  if (!std::holds_alternative<BernoulliLogistic>(model)) return latent;
  return latent.unaryExpr([](double v) { return sigmoid(v); });
}

double ci_halfwidth(double freq, std::size_t replicates, double z) {
  if (replicates == 0) return 0.0;
  return z * std::sqrt(freq * (1.0 - freq) / static_cast<double>(replicates));
}

WinProbEstimate estimate_win_prob(const WorldConfig& config, const MechanismChoice& mechanism,
                                  const ReferenceNoiseModel& reference_noise,
                                  const std::vector<DeviationStrategy>& strategies,
                                  std::size_t replicates, std::uint64_t seed) {
  validate(config);
  if (replicates < 1) throw ValidationError("need at least one replicate");
  const std::size_t n = config.expert_sds.size();
  if (!strategies.empty() && strategies.size() != n) throw DimensionError("one strategy per expert required");
  for (const auto& s : strategies) validate_strategy(s);
  if (reference_noise.kind == ReferenceNoiseModel::Kind::GaussianNoise) {
    require_positive(reference_noise.sd, "reference noise sd");
    if (mechanism.kind != SimMechanism::Oracular) {
      throw ValidationError("reference noise applies only to the oracular mechanism");
    }
  }
  if (mechanism.kind == SimMechanism::Womac) validate(mechanism.womac, config.tasks, n);

  std::vector<std::size_t> winners(replicates);
  const auto total = static_cast<std::ptrdiff_t>(replicates);
  ExceptionSlot failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < total; ++r) {
    failure.run([&] {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    World world = sample_world(config, rng);
    Matrix latent = world.latent.values();
    for (std::size_t j = 0; j < strategies.size(); ++j) apply_strategy(strategies[j], latent.col(static_cast<Eigen::Index>(j)));
    PredictionMatrix reports(to_report_scale(config.outcome_model, latent));

    std::size_t winner = 0;
    switch (mechanism.kind) {
      case SimMechanism::Standard:
        winner = run_standard(reports, world.outcomes).winner;
        break;
      case SimMechanism::Oracular: {
        Vector reference = world.theta.values;
        if (reference_noise.kind == ReferenceNoiseModel::Kind::GaussianNoise) {
          std::normal_distribution<double> normal(0.0, reference_noise.sd);
          for (Eigen::Index i = 0; i < reference.size(); ++i) reference[i] += normal(rng);
        }
        winner = run_oracular(reports, OracleVector{to_report_scale(config.outcome_model, reference)}).winner;
        break;
      }
      case SimMechanism::Womac:
        winner = run_womac(reports, world.outcomes, mechanism.womac).result.winner;
        break;
    }
    winners[static_cast<std::size_t>(r)] = winner;
    });
  }
  failure.rethrow();

  WinProbEstimate out;
  out.replicates = replicates;
  out.wins.assign(n, 0);
  for (std::size_t w : winners) ++out.wins[w];
  out.per_expert_freq.resize(n);
  out.ci_halfwidth.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.per_expert_freq[j] = static_cast<double>(out.wins[j]) / static_cast<double>(replicates);
    out.ci_halfwidth[j] = ci_halfwidth(out.per_expert_freq[j], replicates);
  }
  return out;
}

std::size_t best_expert(const WorldConfig& config) {
  if (config.expert_sds.empty()) throw ValidationError("no experts");
  std::size_t best = 0;
  bool unique = true;
  for (std::size_t j = 1; j < config.expert_sds.size(); ++j) {
    if (config.expert_sds[j] < config.expert_sds[best]) {
      best = j;
      unique = true;
    } else if (config.expert_sds[j] == config.expert_sds[best]) {
      unique = false;
    }
  }
  if (!unique) throw ValidationError("best expert is not unique");
  return best;
}

std::vector<EfficiencyRow> efficiency_curve(const WorldConfig& config,
                                            const ReferenceNoiseModel& noise_a,
                                            const ReferenceNoiseModel& noise_b,
                                            const std::vector<std::size_t>& task_grid,
                                            std::size_t replicates, std::uint64_t seed) {
  if (task_grid.empty()) throw ValidationError("task grid is empty");
  const std::size_t best = best_expert(config);
  const MechanismChoice oracular{SimMechanism::Oracular, {}};
  std::vector<EfficiencyRow> rows;
  for (std::size_t g = 0; g < task_grid.size(); ++g) {
    WorldConfig at = config;
    at.tasks = task_grid[g];
    const std::uint64_t point_seed = derive_seed(seed, g);
    const auto a = estimate_win_prob(at, oracular, noise_a, {}, replicates, point_seed);
    const auto b = estimate_win_prob(at, oracular, noise_b, {}, replicates, point_seed);
    rows.push_back({at.tasks, a.per_expert_freq[best], a.ci_halfwidth[best], b.per_expert_freq[best],
                    b.ci_halfwidth[best]});
  }
  return rows;
}

std::vector<double> log_uniform_sds(std::size_t n, double lo, double hi, std::uint64_t seed) {
  require_positive(lo, "lower sd");
  require_positive(hi, "upper sd");
  if (hi < lo) throw ValidationError("upper sd below lower sd");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(std::log(lo), std::log(hi));
  std::vector<double> sds(n);
  for (auto& sd : sds) sd = std::exp(unit(rng));
  return sds;
}

}  // namespace womac
