#include "womac/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

namespace womac {
namespace {

struct Location {
  const std::string& source;
  std::size_t line;
};

[[noreturn]] void fail(const Location& at, const std::string& message) {
  throw ValidationError(at.source + ":" + std::to_string(at.line) + ": " + message);
}

// One CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_fields(std::string_view line, const Location& at) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) fail(at, "unterminated quoted field");
  return fields;
}

double parse_number(const std::string& text, const Location& at) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) fail(at, "cannot parse number '" + text + "'");
  if (!std::isfinite(value)) fail(at, "non-finite number '" + text + "'");
  return value;
}

template <class OnRecord>
void read_table(std::istream& in, const std::string& source, const std::vector<std::string>& header,
                OnRecord on_record) {
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const Location at{source, number};
    if (!seen_header) {
      if (split_fields(line, at) != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        fail(at, "expected header '" + expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_fields(line, at);
    if (fields.size() != header.size()) {
      fail(at, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    on_record(fields, at);
  }
  if (!seen_header) throw ValidationError(source + ": missing header");
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

struct Layout {
  std::vector<std::string> tasks;
  std::unordered_map<std::string, std::size_t> task_index;
  std::vector<std::string> experts;  // lexicographic
  std::unordered_map<std::string, std::size_t> expert_index;
};

Layout layout_of(const RawDataset& raw) {
  Layout layout;
  for (const auto& o : raw.outcomes) {
    layout.task_index.emplace(o.task_id, layout.tasks.size());
    layout.tasks.push_back(o.task_id);
  }
  std::set<std::string> experts;
  for (const auto& p : raw.predictions) experts.insert(p.expert_id);
  layout.experts.assign(experts.begin(), experts.end());
  for (std::size_t j = 0; j < layout.experts.size(); ++j) layout.expert_index.emplace(layout.experts[j], j);
  return layout;
}

// answered(task, expert) and the prediction grid in canonical layout.
struct Grid {
  Matrix values;
  ImputedMask present;
};

Grid grid_of(const RawDataset& raw, const Layout& layout) {
  Grid grid{Matrix::Zero(static_cast<Eigen::Index>(layout.tasks.size()), static_cast<Eigen::Index>(layout.experts.size())),
            ImputedMask::Constant(static_cast<Eigen::Index>(layout.tasks.size()),
                                  static_cast<Eigen::Index>(layout.experts.size()), false)};
  for (const auto& p : raw.predictions) {
    const auto i = static_cast<Eigen::Index>(layout.task_index.at(p.task_id));
    const auto j = static_cast<Eigen::Index>(layout.expert_index.at(p.expert_id));
    grid.values(i, j) = p.prediction;
    grid.present(i, j) = true;
  }
  return grid;
}

Dataset assemble(const RawDataset& raw, const Layout& layout, const Grid& grid,
                 const std::vector<std::size_t>& tasks, const std::vector<std::size_t>& experts) {
  if (tasks.empty()) throw ValidationError("no tasks survive filtering");
  if (experts.size() < 2) throw ValidationError("fewer than two experts survive filtering");
  const auto m = static_cast<Eigen::Index>(tasks.size());
  const auto n = static_cast<Eigen::Index>(experts.size());
  Vector y(m);
  for (Eigen::Index r = 0; r < m; ++r) y[r] = raw.outcomes[tasks[static_cast<std::size_t>(r)]].outcome;
  double fill = 0.0;
  for (Eigen::Index r = 0; r < m; ++r) fill += y[r];
  fill /= static_cast<double>(m);

  Matrix w(m, n);
  ImputedMask imputed(m, n);
  std::vector<std::string> task_ids, expert_ids;
  for (std::size_t t : tasks) task_ids.push_back(layout.tasks[t]);
  for (std::size_t e : experts) expert_ids.push_back(layout.experts[e]);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto j = static_cast<Eigen::Index>(experts[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto i = static_cast<Eigen::Index>(tasks[static_cast<std::size_t>(r)]);
      imputed(r, c) = !grid.present(i, j);
      w(r, c) = imputed(r, c) ? fill : grid.values(i, j);
    }
  }
  return Dataset{PredictionMatrix(std::move(w), std::move(task_ids), std::move(expert_ids)),
                 OutcomeVector(std::move(y), raw.kind), std::move(imputed)};
}

}  // namespace

RawDataset parse_csv(std::istream& predictions, std::istream& outcomes,
                     const std::string& predictions_source, const std::string& outcomes_source) {
  RawDataset raw;
  raw.predictions_source = predictions_source;
  raw.outcomes_source = outcomes_source;

  std::unordered_map<std::string, std::size_t> tasks;
  read_table(outcomes, outcomes_source, {"task_id", "outcome"},
             [&](std::vector<std::string>& fields, const Location& at) {
               if (fields[0].empty()) fail(at, "empty task_id");
               const double value = parse_number(fields[1], at);
               if (!tasks.emplace(fields[0], raw.outcomes.size()).second) {
                 fail(at, "duplicate outcome for task '" + fields[0] + "'");
               }
               raw.outcomes.push_back({std::move(fields[0]), value});
             });
  raw.kind = OutcomeKind::Binary;
  for (const auto& o : raw.outcomes) {
    if (o.outcome != 0.0 && o.outcome != 1.0) raw.kind = OutcomeKind::Continuous;
  }

  std::set<std::pair<std::string, std::string>> cells;
  read_table(predictions, predictions_source, {"task_id", "expert_id", "prediction"},
             [&](std::vector<std::string>& fields, const Location& at) {
               if (fields[0].empty() || fields[1].empty()) fail(at, "empty task_id or expert_id");
               if (!tasks.contains(fields[0])) fail(at, "unknown task '" + fields[0] + "'");
               const double value = parse_number(fields[2], at);
               if (raw.kind == OutcomeKind::Binary && (value < 0.0 || value > 1.0)) {
                 fail(at, "prediction " + fields[2] + " outside [0, 1] for binary outcomes");
               }
               if (!cells.emplace(fields[0], fields[1]).second) {
                 fail(at, "duplicate prediction for task '" + fields[0] + "', expert '" + fields[1] + "'");
               }
               raw.predictions.push_back({std::move(fields[0]), std::move(fields[1]), value});
             });
  return raw;
}

RawDataset load_csv(const std::filesystem::path& predictions, const std::filesystem::path& outcomes) {
  std::ifstream p(predictions);
  if (!p) throw IoError("cannot open " + predictions.string());
  std::ifstream o(outcomes);
  if (!o) throw IoError("cannot open " + outcomes.string());
  return parse_csv(p, o, predictions.string(), outcomes.string());
}

void write_csv(const RawDataset& raw, std::ostream& predictions, std::ostream& outcomes) {
  const Layout layout = layout_of(raw);
  outcomes << "task_id,outcome\n";
  for (const auto& o : raw.outcomes) outcomes << quote_if_needed(o.task_id) << ',' << format_number(o.outcome) << '\n';

  std::vector<const PredictionRecord*> ordered;
  for (const auto& p : raw.predictions) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [&](const PredictionRecord* a, const PredictionRecord* b) {
    const auto ta = layout.task_index.at(a->task_id);
    const auto tb = layout.task_index.at(b->task_id);
    return ta != tb ? ta < tb : a->expert_id < b->expert_id;
  });
  predictions << "task_id,expert_id,prediction\n";
  for (const auto* p : ordered) {
    predictions << quote_if_needed(p->task_id) << ',' << quote_if_needed(p->expert_id) << ','
                << format_number(p->prediction) << '\n';
  }
}

void write_csv(const RawDataset& raw, const std::filesystem::path& predictions,
               const std::filesystem::path& outcomes) {
  std::ofstream p(predictions, std::ios::binary);
  std::ofstream o(outcomes, std::ios::binary);
  if (!p || !o) throw IoError("cannot write dataset files");
  write_csv(raw, p, o);
}

RawDataset to_raw(const PredictionMatrix& reports, const OutcomeVector& outcomes) {
  if (outcomes.size() != reports.tasks()) throw DimensionError("outcome length does not match task count");
  RawDataset raw;
  raw.kind = outcomes.kind();
  for (std::size_t i = 0; i < reports.tasks(); ++i) {
    raw.outcomes.push_back({reports.task_ids()[i], outcomes.values()[static_cast<Eigen::Index>(i)]});
    for (std::size_t j = 0; j < reports.experts(); ++j) {
      raw.predictions.push_back({reports.task_ids()[i], reports.expert_ids()[j],
                                 reports.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
  return raw;
}

Dataset filter_complete(const RawDataset& raw) {
  const Layout layout = layout_of(raw);
  const Grid grid = grid_of(raw, layout);
  std::vector<std::size_t> tasks(layout.tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i] = i;
  std::vector<std::size_t> experts;
  for (std::size_t j = 0; j < layout.experts.size(); ++j) {
    if (grid.present.col(static_cast<Eigen::Index>(j)).all()) experts.push_back(j);
  }
  return assemble(raw, layout, grid, tasks, experts);
}

Dataset filter_hfc(const RawDataset& raw, std::size_t min_task_responses, double min_expert_completion) {
  if (!(min_expert_completion >= 0.0 && min_expert_completion <= 1.0)) {
    throw ValidationError("expert completion threshold must lie in [0, 1]");
  }
  const Layout layout = layout_of(raw);
  const Grid grid = grid_of(raw, layout);
  std::vector<std::size_t> tasks;
  for (std::size_t i = 0; i < layout.tasks.size(); ++i) {
    if (static_cast<std::size_t>(grid.present.row(static_cast<Eigen::Index>(i)).count()) >= min_task_responses) {
      tasks.push_back(i);
    }
  }
  if (tasks.empty()) throw ValidationError("no task reaches the response threshold");
  std::vector<std::size_t> experts;
  for (std::size_t j = 0; j < layout.experts.size(); ++j) {
    std::size_t answered = 0;
    for (std::size_t i : tasks) answered += grid.present(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ? 1 : 0;
    if (static_cast<double>(answered) >= min_expert_completion * static_cast<double>(tasks.size()) && answered > 0) {
      experts.push_back(j);
    }
  }
  return assemble(raw, layout, grid, tasks, experts);
}

}  // namespace womac
