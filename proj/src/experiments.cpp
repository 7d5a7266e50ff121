#include "womac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "womac/mechanisms.hpp"
#include "womac/meta.hpp"
#include "womac/parallel.hpp"
#include "womac/rng.hpp"

namespace womac {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kExpertStream = 0x6578706572747321ULL;

void require_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("correlation inputs differ in length");
  if (x.size() < 2) throw ValidationError("correlation needs at least two points");
  require_finite(x, "correlation input");
  require_finite(y, "correlation input");
}

double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) return kMissing;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double or_missing(std::optional<double> v) { return v ? *v : kMissing; }

std::vector<double> resolve_grid(const TunedInSample& tuned) {
  return tuned.grid.empty() ? default_k_grid() : tuned.grid;
}

std::vector<std::size_t> draw_subset(std::size_t total, std::size_t count, Rng& rng) {
  std::vector<std::size_t> pool(total);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t s = 0; s < count; ++s) {
    std::uniform_int_distribution<std::size_t> pick(s, total - 1);
    std::swap(pool[s], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

void validate(const ExperimentConfig& config, std::size_t m_total, std::size_t n_total) {
  if (config.n_subsamples < 1) throw ValidationError("need at least one sub-sample");
  if (config.m_train_grid.empty()) throw ValidationError("m_train grid is empty");
  if (config.m_test < 2) throw ValidationError("m_test must be at least 2");
  for (std::size_t m_train : config.m_train_grid) {
    if (m_train < 2) throw ValidationError("m_train must be at least 2");
    if (m_train + config.m_test > m_total) {
      throw ValidationError("m_train + m_test = " + std::to_string(m_train + config.m_test) +
                            " exceeds the " + std::to_string(m_total) + " available tasks");
    }
  }
  if (config.expert_subsample && (*config.expert_subsample < 3 || *config.expert_subsample > n_total)) {
    throw ValidationError("expert sub-sample must lie in [3, n]");
  }
  std::visit([](const auto& p) {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, FixedK>) {
      require_valid_k(p.k);
    } else {
      for (double k : p.grid) require_valid_k(k);
    }
  }, config.k_policy);
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v);
}

nlohmann::ordered_json to_json(const CorrelationSummary& s) {
  return {{"mean", number_or_null(s.mean)}, {"sd", number_or_null(s.sd)}, {"se", number_or_null(s.se)},
          {"count", s.count}, {"missing", s.missing}};
}

}  // namespace

std::vector<Split> make_splits(std::size_t m_total, std::size_t m_train, std::size_t m_test,
                               std::size_t count, std::uint64_t seed) {
  if (m_train < 1 || m_test < 1) throw ValidationError("train and test sizes must be positive");
  if (m_train + m_test > m_total) throw ValidationError("train and test sizes exceed the task count");
  if (count < 1) throw ValidationError("need at least one split");
  std::vector<Split> splits(count);
  for (std::size_t s = 0; s < count; ++s) {
    Rng rng = make_rng(seed, s);
    auto drawn = draw_subset(m_total, m_train + m_test, rng);
    Split& split = splits[s];
    split.train.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(m_train));
    split.test.assign(drawn.begin() + static_cast<std::ptrdiff_t>(m_train), drawn.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
  }
  return splits;
}

SplitScores score_split(const PredictionMatrix& reports, const OutcomeVector& outcomes,
                        const Split& split, const KPolicy& k_policy) {
  if (outcomes.size() != reports.tasks()) throw DimensionError("outcome length does not match task count");
  const PredictionMatrix train = reports.select_tasks(split.train);
  const OutcomeVector train_y = outcomes.select(split.train);

  SplitScores out;
  if (const auto* fixed = std::get_if<FixedK>(&k_policy)) {
    out.k_used = fixed->k;
  } else {
    const auto grid = resolve_grid(std::get<TunedInSample>(k_policy));
    out.k_used = tune_k(train, train_y, grid).best_k;
  }
  out.womac_in = womac_score_only(train, train_y, WomacConfig{TopKAverage{out.k_used}});
  out.mse_in = run_standard(train, train_y).scores;
  out.mse_out = run_standard(reports.select_tasks(split.test), outcomes.select(split.test)).scores;
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + end + 1);
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = rank;
    start = end;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  return pearson(rx, ry);
}

CorrelationSummary summarize(std::span<const double> values) {
  CorrelationSummary s;
  double total = 0.0;
  for (double v : values) {
    if (std::isnan(v)) {
      ++s.missing;
    } else {
      total += v;
      ++s.count;
    }
  }
  if (s.count == 0) {
    s.mean = s.sd = s.se = kMissing;
    return s;
  }
  s.mean = total / static_cast<double>(s.count);
  if (s.count < 2) {
    s.sd = s.se = kMissing;
    return s;
  }
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
  }
  s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
  s.se = s.sd / std::sqrt(static_cast<double>(s.count));
  return s;
}

CorrelationReport run_correlation_experiment(const PredictionMatrix& reports,
                                             const OutcomeVector& outcomes,
                                             const ExperimentConfig& config) {
  if (outcomes.size() != reports.tasks()) throw DimensionError("outcome length does not match task count");
  validate(config, reports.tasks(), reports.experts());

  std::optional<PredictionMatrix> subsampled;
  if (config.expert_subsample && *config.expert_subsample < reports.experts()) {
    Rng rng = make_rng(config.seed, kExpertStream);
    auto experts = draw_subset(reports.experts(), *config.expert_subsample, rng);
    std::sort(experts.begin(), experts.end());
    subsampled = reports.select_experts(experts);
  }
  const PredictionMatrix& pool = subsampled ? *subsampled : reports;

  CorrelationReport report;
  report.tasks = pool.tasks();
  report.experts = pool.experts();
  for (std::size_t m_train : config.m_train_grid) {
    const auto splits = make_splits(pool.tasks(), m_train, config.m_test, config.n_subsamples,
                                    derive_seed(config.seed, m_train));
    MTrainReport row;
    row.m_train = m_train;
    row.splits.resize(splits.size());

    ExceptionSlot failure;
    const auto count = static_cast<std::ptrdiff_t>(splits.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      failure.run([&] {
        const auto scores = score_split(pool, outcomes, splits[static_cast<std::size_t>(s)], config.k_policy);
        auto& out = row.splits[static_cast<std::size_t>(s)];
        out.pearson_womac = or_missing(pearson(scores.womac_in, scores.mse_out));
        out.pearson_mse = or_missing(pearson(scores.mse_in, scores.mse_out));
        out.spearman_womac = or_missing(spearman(scores.womac_in, scores.mse_out));
        out.spearman_mse = or_missing(spearman(scores.mse_in, scores.mse_out));
        out.k_used = scores.k_used;
      });
    }
    failure.rethrow();

    std::vector<double> pw, pm, pg, sw, sm, sg, ks;
    for (const auto& s : row.splits) {
      pw.push_back(s.pearson_womac);
      pm.push_back(s.pearson_mse);
      pg.push_back(s.pearson_womac - s.pearson_mse);
      sw.push_back(s.spearman_womac);
      sm.push_back(s.spearman_mse);
      sg.push_back(s.spearman_womac - s.spearman_mse);
      ks.push_back(s.k_used);
    }
    row.pearson_womac = summarize(pw);
    row.pearson_mse = summarize(pm);
    row.pearson_gap = summarize(pg);
    row.spearman_womac = summarize(sw);
    row.spearman_mse = summarize(sm);
    row.spearman_gap = summarize(sg);
    row.k_distribution = {quantile(ks, 0.05), quantile(ks, 0.25), quantile(ks, 0.5), quantile(ks, 0.75),
                          quantile(ks, 0.95)};
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_csv(const CorrelationReport& report) {
  std::ostringstream out;
  out << "m_train,correlation,score,mean,sd,se,count,missing\n";
  auto line = [&](std::size_t m_train, const char* corr, const char* score, const CorrelationSummary& s) {
    auto num = [](double v) {
      if (std::isnan(v)) return std::string("NA");
      return format_number(v);
    };
    out << m_train << ',' << corr << ',' << score << ',' << num(s.mean) << ',' << num(s.sd) << ','
        << num(s.se) << ',' << s.count << ',' << s.missing << '\n';
  };
  for (const auto& row : report.rows) {
    line(row.m_train, "pearson", "womac", row.pearson_womac);
    line(row.m_train, "pearson", "mse", row.pearson_mse);
    line(row.m_train, "pearson", "gap", row.pearson_gap);
    line(row.m_train, "spearman", "womac", row.spearman_womac);
    line(row.m_train, "spearman", "mse", row.spearman_mse);
    line(row.m_train, "spearman", "gap", row.spearman_gap);
  }
  return out.str();
}

nlohmann::ordered_json to_json(const CorrelationReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json splits = nlohmann::ordered_json::array();
    for (const auto& s : row.splits) {
      splits.push_back({{"pearson_womac", number_or_null(s.pearson_womac)},
                        {"pearson_mse", number_or_null(s.pearson_mse)},
                        {"spearman_womac", number_or_null(s.spearman_womac)},
                        {"spearman_mse", number_or_null(s.spearman_mse)},
                        {"k", s.k_used}});
    }
    const auto& k = row.k_distribution;
    rows.push_back({{"m_train", row.m_train},
                    {"pearson", {{"womac", to_json(row.pearson_womac)},
                                 {"mse", to_json(row.pearson_mse)},
                                 {"gap", to_json(row.pearson_gap)}}},
                    {"spearman", {{"womac", to_json(row.spearman_womac)},
                                  {"mse", to_json(row.spearman_mse)},
                                  {"gap", to_json(row.spearman_gap)}}},
                    {"k_distribution", {{"p05", k.p05}, {"q25", k.q25}, {"median", k.median},
                                        {"q75", k.q75}, {"p95", k.p95}}},
                    {"splits", std::move(splits)}});
  }
  return {{"tasks", report.tasks}, {"experts", report.experts}, {"rows", std::move(rows)}};
}

}  // namespace womac
