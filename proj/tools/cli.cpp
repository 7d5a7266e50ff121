#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "womac/data.hpp"
#include "womac/experiments.hpp"
#include "womac/mechanisms.hpp"
#include "womac/meta.hpp"
#include "womac/parallel.hpp"
#include "womac/sim.hpp"

namespace womac::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Flags explicitly given on the command line override the config file,
// which overrides the built-in defaults.
class Overrides {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    auto* option = app->add_option(flag, *value, help);
    entries_.push_back({option, [value, key](json& cfg) { cfg[key] = *value; }});
    return option;
  }

  void apply(json& cfg) const {
    for (const auto& e : entries_) {
      if (e.option->count() > 0) e.set(cfg);
    }
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::function<void(json&)> set;
  };
  std::vector<Entry> entries_;
};

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
};

void add_common(CLI::App* app, Common& common) {
  app->add_option("--config", common.config_path, "JSON config file (flags override it)");
  app->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  app->add_option("--threads", common.threads, "Worker thread cap; results do not depend on it");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
}

json resolve(json defaults, const Common& common, const Overrides& overrides) {
  if (!common.config_path.empty()) {
    json loaded = read_json(common.config_path);
    if (!loaded.is_object()) throw ValidationError("config must be a JSON object");
    for (auto& [key, value] : loaded.items()) {
      if (!defaults.contains(key)) throw ValidationError("unknown config key '" + key + "'");
      defaults[key] = value;
    }
  }
  overrides.apply(defaults);
  return defaults;
}

template <class T>
T get(const json& cfg, const std::string& key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("config key '" + key + "': " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

fs::path prepare_out(const Common& common) {
  fs::path dir(common.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string number(double v) { return format_number(v); }

// FNV-1a over the IEEE-754 bit patterns, column-major.
std::string checksum(const Matrix& values) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    std::uint64_t bits = 0;
    const double v = values.data()[k];
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      hash ^= (bits >> (8 * b)) & 0xFFU;
      hash *= 0x100000001b3ULL;
    }
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex;
  out.width(16);
  out.fill('0');
  out << hash;
  return out.str();
}

Dataset load_dataset(const json& cfg) {
  const auto predictions = get<std::string>(cfg, "predictions");
  const auto outcomes = get<std::string>(cfg, "outcomes");
  if (predictions.empty() || outcomes.empty()) throw ValidationError("--predictions and --outcomes are required");
  const RawDataset raw = load_csv(predictions, outcomes);
  const auto filter = get<std::string>(cfg, "filter");
  if (filter == "complete") return filter_complete(raw);
  if (filter == "hfc") {
    return filter_hfc(raw, get<std::size_t>(cfg, "min_task_responses"), get<double>(cfg, "min_expert_completion"));
  }
  throw ValidationError("unknown filter '" + filter + "'");
}

json dataset_summary(const Dataset& data) {
  return {{"tasks", data.reports.tasks()},
          {"experts", data.reports.experts()},
          {"imputed_cells", data.imputed.count()}};
}

// ---------------------------------------------------------------- score

int cmd_score(const json& cfg, const fs::path& out) {
  const Dataset data = load_dataset(cfg);
  const auto mechanism = get<std::string>(cfg, "mechanism");

  CompetitionResult result;
  Matrix reference;
  if (mechanism == "standard") {
    result = run_standard(data.reports, data.outcomes);
    reference = ReferenceMatrix::broadcast(data.outcomes.values(), data.reports.experts()).values();
  } else if (mechanism == "womac-topk" || mechanism == "womac-lsq") {
    WomacConfig womac;
    if (mechanism == "womac-topk") {
      womac.meta_learner = TopKAverage{get<double>(cfg, "k")};
    } else {
      womac.meta_learner = LeastSquares{get<std::size_t>(cfg, "screen_size"), get<double>(cfg, "ridge")};
    }
    auto run = run_womac(data.reports, data.outcomes, womac);
    result = std::move(run.result);
    reference = run.reference.values();
  } else {
    throw ValidationError("unknown mechanism '" + mechanism + "'");
  }

  const auto order = rank_by_error(result.scores);
  const auto m = static_cast<double>(data.reports.tasks());
  std::ostringstream board;
  board << "rank,expert_id,score,mean_score\n";
  std::size_t rank = 0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t j = order[pos];
    if (pos == 0 || result.scores[j] != result.scores[order[pos - 1]]) rank = pos + 1;
    board << rank << ',' << data.reports.expert_ids()[j] << ',' << number(result.scores[j]) << ','
          << number(result.scores[j] / m) << '\n';
  }
  write_file(out / "leaderboard.csv", board.str());

  json ties = json::array();
  for (std::size_t j : result.tied_winners) ties.push_back(data.reports.expert_ids()[j]);
  json summary = {{"mechanism", std::string(to_string(result.mechanism_tag))},
                  {"winner", data.reports.expert_ids()[result.winner]},
                  {"winner_index", result.winner},
                  {"tied_winners", ties},
                  {"dataset", dataset_summary(data)},
                  {"reference_checksum", checksum(reference)},
                  {"config", cfg}};
  write_file(out / "result.json", dump(summary));
  std::cout << "winner " << data.reports.expert_ids()[result.winner] << " (score "
            << number(result.scores[result.winner]) << ")\n";
  return kOk;
}

// ------------------------------------------------------------- simulate

json simulate_defaults(const std::string& preset) {
  if (preset == "fig1-outflank") {
    return {{"preset", preset}, {"seed", 0}, {"replicates", 50000}, {"experts", 10}, {"tau1", 0.1},
            {"tau2", 10.0}, {"delta", nullptr}, {"direction", 1}};
  }
  if (preset == "thm2-precision") {
    return {{"preset", preset}, {"seed", 0}, {"replicates", 20000}, {"experts", 10}, {"tasks", 10},
            {"best_sd", 0.3}, {"peer_sd", 0.6}, {"prior_sd", 1.0}, {"sd_a", 0.1}, {"sd_b", 1.0}};
  }
  if (preset == "efficiency-curve") {
    return {{"preset", preset}, {"seed", 0}, {"replicates", 5000}, {"experts", 10},
            {"m_grid", std::vector<std::size_t>{1, 2, 5, 10, 20, 40}}, {"best_sd", 0.3}, {"peer_sd", 0.6},
            {"prior_sd", 1.0}, {"sd_a", 0.1}, {"sd_b", 1.0}};
  }
  throw ValidationError("unknown preset '" + preset + "'");
}

WorldConfig precision_world(const json& cfg, std::size_t tasks) {
  const auto n = get<std::size_t>(cfg, "experts");
  if (n < 2) throw ValidationError("need at least two experts");
  WorldConfig world;
  world.tasks = tasks;
  world.theta_prior = GaussianPrior{0.0, get<double>(cfg, "prior_sd")};
  world.outcome_model = GaussianOutcome{1.0};
  world.expert_sds.assign(n, get<double>(cfg, "peer_sd"));
  world.expert_sds[0] = get<double>(cfg, "best_sd");
  return world;
}

int cmd_simulate(json& cfg, const fs::path& out) {
  const auto preset = get<std::string>(cfg, "preset");
  const auto seed = get<std::uint64_t>(cfg, "seed");
  const auto replicates = get<std::size_t>(cfg, "replicates");
  json results;
  std::ostringstream csv;

  if (preset == "fig1-outflank") {
    const double tau1 = get<double>(cfg, "tau1");
    if (cfg["delta"].is_null()) cfg["delta"] = 2.0 * tau1;
    const auto n = get<std::size_t>(cfg, "experts");
    if (n < 2) throw ValidationError("need at least two experts");
    WorldConfig world;
    world.tasks = 1;
    world.theta_prior = FixedTheta{Vector::Zero(1)};
    world.outcome_model = GaussianOutcome{get<double>(cfg, "tau2")};
    world.expert_sds.assign(n, tau1);
    const MechanismChoice standard{SimMechanism::Standard, {}};
    std::vector<DeviationStrategy> outflank(n, Truthful{});
    outflank[0] = Outflank{get<double>(cfg, "delta"), get<int>(cfg, "direction")};
    const auto truthful = estimate_win_prob(world, standard, ReferenceNoiseModel::exact(), {}, replicates, seed);
    const auto deviating = estimate_win_prob(world, standard, ReferenceNoiseModel::exact(), outflank, replicates, seed);
    const double fair = 1.0 / static_cast<double>(n);
    csv << "scenario,focal_expert,freq,ci95,fair_share\n";
    csv << "truthful,0," << number(truthful.per_expert_freq[0]) << ',' << number(truthful.ci_halfwidth[0]) << ','
        << number(fair) << '\n';
    csv << "outflank,0," << number(deviating.per_expert_freq[0]) << ',' << number(deviating.ci_halfwidth[0]) << ','
        << number(fair) << '\n';
    results = {{"fair_share", fair},
               {"truthful", {{"freq", truthful.per_expert_freq}, {"ci95", truthful.ci_halfwidth}}},
               {"outflank", {{"freq", deviating.per_expert_freq}, {"ci95", deviating.ci_halfwidth}}}};
  } else if (preset == "thm2-precision") {
    const WorldConfig world = precision_world(cfg, get<std::size_t>(cfg, "tasks"));
    const MechanismChoice oracular{SimMechanism::Oracular, {}};
    const double sd_a = get<double>(cfg, "sd_a");
    const double sd_b = get<double>(cfg, "sd_b");
    const auto a = estimate_win_prob(world, oracular, ReferenceNoiseModel::gaussian(sd_a), {}, replicates, seed);
    const auto b = estimate_win_prob(world, oracular, ReferenceNoiseModel::gaussian(sd_b), {}, replicates, seed);
    constexpr double z99 = 2.5758293035489004;
    const double fa = a.per_expert_freq[0];
    const double fb = b.per_expert_freq[0];
    const double ca = ci_halfwidth(fa, replicates, z99);
    const double cb = ci_halfwidth(fb, replicates, z99);
    const bool separated = (fa - ca > fb + cb) || (fb - cb > fa + ca);
    csv << "reference,sd,best_freq,ci99\n";
    csv << "a," << number(sd_a) << ',' << number(fa) << ',' << number(ca) << '\n';
    csv << "b," << number(sd_b) << ',' << number(fb) << ',' << number(cb) << '\n';
    results = {{"best_expert", 0},
               {"a", {{"sd", sd_a}, {"best_freq", fa}, {"ci99", ca}, {"freq", a.per_expert_freq}}},
               {"b", {{"sd", sd_b}, {"best_freq", fb}, {"ci99", cb}, {"freq", b.per_expert_freq}}},
               {"separated", separated}};
  } else if (preset == "efficiency-curve") {
    const WorldConfig world = precision_world(cfg, 1);
    const auto grid = get<std::vector<std::size_t>>(cfg, "m_grid");
    const auto rows = efficiency_curve(world, ReferenceNoiseModel::gaussian(get<double>(cfg, "sd_a")),
                                       ReferenceNoiseModel::gaussian(get<double>(cfg, "sd_b")), grid, replicates, seed);
    csv << "tasks,freq_a,ci_a,freq_b,ci_b\n";
    results = json::array();
    for (const auto& r : rows) {
      csv << r.tasks << ',' << number(r.freq_a) << ',' << number(r.ci_a) << ',' << number(r.freq_b) << ','
          << number(r.ci_b) << '\n';
      results.push_back({{"tasks", r.tasks}, {"freq_a", r.freq_a}, {"ci_a", r.ci_a}, {"freq_b", r.freq_b},
                         {"ci_b", r.ci_b}});
    }
  }

  write_file(out / "simulate.csv", csv.str());
  write_file(out / "simulate.json", dump({{"config", cfg}, {"results", results}}));
  std::cout << csv.str();
  return kOk;
}

// ----------------------------------------------------------- experiment

json experiment_defaults() {
  ExperimentConfig base;
  return {{"predictions", ""},
          {"outcomes", ""},
          {"filter", "complete"},
          {"min_task_responses", 250},
          {"min_expert_completion", 0.5},
          {"m_train_grid", base.m_train_grid},
          {"n_subsamples", base.n_subsamples},
          {"m_test", base.m_test},
          {"k", "tuned"},
          {"k_grid", default_k_grid()},
          {"k_sweep", json::array()},
          {"expert_subsamples", std::vector<std::size_t>{0}},
          {"seed", 0}};
}

int cmd_experiment(const json& cfg, const fs::path& out) {
  const Dataset data = load_dataset(cfg);

  ExperimentConfig base;
  base.m_train_grid = get<std::vector<std::size_t>>(cfg, "m_train_grid");
  base.n_subsamples = get<std::size_t>(cfg, "n_subsamples");
  base.m_test = get<std::size_t>(cfg, "m_test");
  base.seed = get<std::uint64_t>(cfg, "seed");

  std::vector<std::pair<std::string, KPolicy>> policies;
  const auto sweep = get<std::vector<double>>(cfg, "k_sweep");
  if (!sweep.empty()) {
    for (double k : sweep) policies.emplace_back("k=" + number(k), FixedK{k});
  } else if (cfg.at("k").is_string()) {
    if (cfg.at("k") != "tuned") throw ValidationError("k must be \"tuned\" or a number");
    policies.emplace_back("k=tuned", TunedInSample{get<std::vector<double>>(cfg, "k_grid")});
  } else {
    const double k = get<double>(cfg, "k");
    policies.emplace_back("k=" + number(k), FixedK{k});
  }
  const auto pools = get<std::vector<std::size_t>>(cfg, "expert_subsamples");
  if (pools.empty()) throw ValidationError("expert_subsamples must not be empty");

  std::ostringstream csv;
  csv << "variant,";
  json reports = json::array();
  bool header = true;
  for (const auto& [policy_label, policy] : policies) {
    for (std::size_t pool : pools) {
      ExperimentConfig config = base;
      config.k_policy = policy;
      if (pool != 0) config.expert_subsample = pool;
      const std::string label = policy_label + ";experts=" + (pool == 0 ? std::string("all") : std::to_string(pool));
      const auto report = run_correlation_experiment(data.reports, data.outcomes, config);
      std::istringstream table(to_csv(report));
      std::string line;
      std::getline(table, line);
      if (header) {
        csv << line << '\n';
        header = false;
      }
      while (std::getline(table, line)) csv << label << ',' << line << '\n';
      reports.push_back({{"variant", label}, {"report", to_json(report)}});
    }
  }
  write_file(out / "experiment.csv", csv.str());
  write_file(out / "experiment.json",
             dump({{"config", cfg}, {"dataset", dataset_summary(data)}, {"reports", std::move(reports)}}));
  std::cout << csv.str();
  return kOk;
}

// ---------------------------------------------------------------- synth

json synth_defaults() {
  return {{"experts", 200}, {"tasks", 60}, {"sd_min", 0.2}, {"sd_max", 2.0}, {"prior_sd", 1.0}, {"seed", 0}};
}

int cmd_synth(const json& cfg, const fs::path& out) {
  const auto seed = get<std::uint64_t>(cfg, "seed");
  WorldConfig world;
  world.tasks = get<std::size_t>(cfg, "tasks");
  world.theta_prior = GaussianPrior{0.0, get<double>(cfg, "prior_sd")};
  world.outcome_model = BernoulliLogistic{};
  world.expert_sds = log_uniform_sds(get<std::size_t>(cfg, "experts"), get<double>(cfg, "sd_min"),
                                     get<double>(cfg, "sd_max"), derive_seed(seed, 0));
  const World draw = sample_world(world, derive_seed(seed, 1));
  const PredictionMatrix reports(to_report_scale(world.outcome_model, draw.latent.values()));
  write_csv(to_raw(reports, draw.outcomes), out / "predictions.csv", out / "outcomes.csv");
  json sds = world.expert_sds;
  write_file(out / "experts.json", dump({{"config", cfg}, {"expert_sds", sds}}));
  return kOk;
}

// ------------------------------------------------------------- dispatch

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "io";
  }
  return "internal";
}

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
  return code;
}

int threads_from_env() {
  const char* env = std::getenv("WOMAC_THREADS");
  if (!env || !*env) return 0;
  try {
    return std::stoi(env);
  } catch (const std::exception&) {
    throw ValidationError("WOMAC_THREADS must be an integer");
  }
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Prediction competition scoring, simulation and experiments"};
  app.require_subcommand(1);

  Common score_common, sim_common, exp_common, synth_common;
  Overrides score_flags, sim_flags, exp_flags, synth_flags;

  auto* score = app.add_subcommand("score", "Score a dataset and write a leaderboard");
  add_common(score, score_common);
  score_flags.add<std::string>(score, "predictions,--predictions", "predictions", "predictions CSV (task_id,expert_id,prediction)");
  score_flags.add<std::string>(score, "outcomes,--outcomes", "outcomes", "outcomes CSV (task_id,outcome)");
  score_flags.add<std::string>(score, "--mechanism", "mechanism", "standard | womac-topk | womac-lsq");
  score_flags.add<double>(score, "--k", "k", "top-k fraction in (0, 1]");
  score_flags.add<std::size_t>(score, "--screen-size", "screen_size", "peers kept by the least-squares screen");
  score_flags.add<double>(score, "--ridge", "ridge", "ridge penalty for least squares");
  score_flags.add<std::string>(score, "--filter", "filter", "complete | hfc");
  score_flags.add<std::size_t>(score, "--min-task-responses", "min_task_responses", "hfc task threshold");
  score_flags.add<double>(score, "--min-expert-completion", "min_expert_completion", "hfc expert threshold");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo win-probability presets");
  add_common(simulate, sim_common);
  std::string preset;
  simulate->add_option("--preset", preset, "fig1-outflank | thm2-precision | efficiency-curve");
  sim_flags.add<std::size_t>(simulate, "--replicates", "replicates", "Monte Carlo replicates");
  sim_flags.add<std::uint64_t>(simulate, "--seed", "seed", "RNG seed");
  sim_flags.add<std::size_t>(simulate, "--experts", "experts", "number of experts");
  sim_flags.add<std::size_t>(simulate, "--tasks", "tasks", "number of tasks (thm2-precision)");
  sim_flags.add<double>(simulate, "--tau1", "tau1", "expert sd (fig1-outflank)");
  sim_flags.add<double>(simulate, "--tau2", "tau2", "outcome sd (fig1-outflank)");
  sim_flags.add<double>(simulate, "--delta", "delta", "outflank offset (default 2 tau1)");
  sim_flags.add<int>(simulate, "--direction", "direction", "outflank direction, +1 or -1");
  sim_flags.add<double>(simulate, "--best-sd", "best_sd", "sd of the best expert");
  sim_flags.add<double>(simulate, "--peer-sd", "peer_sd", "sd of the other experts");
  sim_flags.add<double>(simulate, "--prior-sd", "prior_sd", "sd of the ground-truth prior");
  sim_flags.add<double>(simulate, "--sd-a", "sd_a", "reference noise sd A");
  sim_flags.add<double>(simulate, "--sd-b", "sd_b", "reference noise sd B");
  sim_flags.add<std::vector<std::size_t>>(simulate, "--m-grid", "m_grid", "task counts (efficiency-curve)");

  auto* experiment = app.add_subcommand("experiment", "In-sample vs out-of-sample correlation experiment");
  add_common(experiment, exp_common);
  exp_flags.add<std::string>(experiment, "predictions,--predictions", "predictions", "predictions CSV");
  exp_flags.add<std::string>(experiment, "outcomes,--outcomes", "outcomes", "outcomes CSV");
  exp_flags.add<std::uint64_t>(experiment, "--seed", "seed", "RNG seed");
  exp_flags.add<std::string>(experiment, "--filter", "filter", "complete | hfc");
  exp_flags.add<std::vector<std::size_t>>(experiment, "--m-train", "m_train_grid", "training set sizes");
  exp_flags.add<std::size_t>(experiment, "--subsamples", "n_subsamples", "sub-samples per training size");
  exp_flags.add<std::size_t>(experiment, "--m-test", "m_test", "held-out set size");

  auto* synth = app.add_subcommand("synth", "Write a synthetic binary-outcome dataset");
  add_common(synth, synth_common);
  synth_flags.add<std::size_t>(synth, "--experts", "experts", "number of experts");
  synth_flags.add<std::size_t>(synth, "--tasks", "tasks", "number of tasks");
  synth_flags.add<double>(synth, "--sd-min", "sd_min", "smallest expert sd");
  synth_flags.add<double>(synth, "--sd-max", "sd_max", "largest expert sd");
  synth_flags.add<double>(synth, "--prior-sd", "prior_sd", "sd of the logit prior");
  synth_flags.add<std::uint64_t>(synth, "--seed", "seed", "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kValidation);
  }

  auto run_with = [&](const Common& common, json cfg, auto&& body) {
    set_threads(common.threads > 0 ? common.threads : threads_from_env());
    const fs::path out = prepare_out(common);
    const int code = body(cfg, out);
    write_file(out / "config.json", dump(cfg));
    return code;
  };

  if (*score) {
    json defaults = {{"command", "score"}, {"predictions", ""}, {"outcomes", ""}, {"mechanism", "womac-topk"},
                     {"k", 0.05}, {"screen_size", 5}, {"ridge", 0.0}, {"filter", "complete"},
                     {"min_task_responses", 250}, {"min_expert_completion", 0.5}};
    return run_with(score_common, resolve(defaults, score_common, score_flags),
                    [](json& cfg, const fs::path& out) { return cmd_score(cfg, out); });
  }
  if (*simulate) {
    if (preset.empty() && !sim_common.config_path.empty()) {
      const json loaded = read_json(sim_common.config_path);
      if (loaded.contains("preset")) preset = loaded["preset"].get<std::string>();
    }
    if (preset.empty()) throw ValidationError("--preset is required");
    json merged = {{"command", "simulate"}};
    merged.update(simulate_defaults(preset));
    json cfg = resolve(merged, sim_common, sim_flags);
    if (cfg.at("preset") != preset) throw ValidationError("--preset conflicts with the config file");
    return run_with(sim_common, cfg, [](json& c, const fs::path& out) { return cmd_simulate(c, out); });
  }
  if (*experiment) {
    json merged = {{"command", "experiment"}};
    merged.update(experiment_defaults());
    return run_with(exp_common, resolve(merged, exp_common, exp_flags),
                    [](json& cfg, const fs::path& out) { return cmd_experiment(cfg, out); });
  }
  json merged = {{"command", "synth"}};
  merged.update(synth_defaults());
  return run_with(synth_common, resolve(merged, synth_common, synth_flags),
                  [](json& cfg, const fs::path& out) { return cmd_synth(cfg, out); });
}

}  // namespace

int run(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const Error& e) {
    return report_error(kind_name(e.kind()), e.what(), e.kind() == ErrorKind::Io ? kIo : kValidation);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kInternal);
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("womac");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace womac::cli
