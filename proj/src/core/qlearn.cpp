#include "core/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/dataset_io.hpp"
#include "core/error.hpp"

namespace ruledist {

QTable::QTable(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) raise(ErrorKind::Config, "qtable: dimensions must be positive");
  rows_.assign(static_cast<std::size_t>(width) * height, {0, 0, 0, 0});
}

double QTable::max_value(Cell c) const {
  const auto& r = rows_[index(c)];
  return *std::max_element(r.begin(), r.end());
}

void validate_train(const TrainParams& params) {
  if (!(params.gamma >= 0 && params.gamma < 1)) raise(ErrorKind::Config, "gamma must be in [0, 1)");
  if (!(params.alpha > 0 && params.alpha <= 1)) raise(ErrorKind::Config, "alpha must be in (0, 1]");
  if (!(params.epsilon >= 0 && params.epsilon <= 1))
    raise(ErrorKind::Config, "epsilon must be in [0, 1]");
  if (params.episodes < 1) raise(ErrorKind::Config, "episodes must be positive");
  if (params.step_cap < 1) raise(ErrorKind::Config, "step_cap must be positive");
}

QTable q_learn(const GridWorld& world, const TrainParams& params, std::uint64_t seed) {
  validate_train(params);
  QTable table(world.width(), world.height());
  for (std::int64_t ep = 0; ep < params.episodes; ++ep) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(ep));
    Cell cell = params.exploring_starts ? world.random_start_anywhere(rng) : world.random_start(rng);
    for (std::int64_t t = 0; t < params.step_cap; ++t) {
      int action = rng.next_double() < params.epsilon
                       ? static_cast<int>(rng.next_below(kGridActionCount))
                       : greedy_action(table.row(cell), rng);
      GridWorld::Step step = world.step(cell, action);
      double target = step.reward + (step.done ? 0.0 : params.gamma * table.max_value(step.next));
      double updated = table.value(cell, action) + params.alpha * (target - table.value(cell, action));
      table.set_value(cell, action, updated);
      if (step.done) break;
      cell = step.next;
    }
  }
  return table;
}

void save_qtable(const QTable& table, const std::string& path) {
  static const char* kActionNames[] = {"UP", "DOWN", "LEFT", "RIGHT"};
  std::ostringstream out;
  out << "x\ty\taction\tq\n";
  for (int y = 0; y < table.height(); ++y)
    for (int x = 0; x < table.width(); ++x)
      for (int a = 0; a < kGridActionCount; ++a)
        out << x << '\t' << y << '\t' << kActionNames[a] << '\t'
            << format_double(table.value({x, y}, a)) << '\n';
  write_text_file(path, out.str());
}

QTable load_qtable(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "x\ty\taction\tq")
    raise(ErrorKind::Parse, "qtable '" + path + "': bad header");

  struct Entry {
    int x, y, action;
    double q;
  };
  std::vector<Entry> entries;
  int max_x = 0, max_y = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Entry e{};
    std::string action;
    std::string qtext;
    if (!(fields >> e.x >> e.y >> action >> qtext))
      raise(ErrorKind::Parse, "qtable '" + path + "' line " + std::to_string(lineno) + ": bad row");
    static const char* kActionNames[] = {"UP", "DOWN", "LEFT", "RIGHT"};
    e.action = -1;
    for (int a = 0; a < kGridActionCount; ++a)
      if (action == kActionNames[a]) e.action = a;
    if (e.action < 0 || e.x < 0 || e.y < 0)
      raise(ErrorKind::Parse, "qtable '" + path + "' line " + std::to_string(lineno) + ": bad row");
    try {
      e.q = std::stod(qtext);
    } catch (const std::exception&) {
      raise(ErrorKind::Parse, "qtable '" + path + "' line " + std::to_string(lineno) + ": bad value");
    }
    max_x = std::max(max_x, e.x);
    max_y = std::max(max_y, e.y);
    entries.push_back(e);
  }
  if (entries.empty()) raise(ErrorKind::Parse, "qtable '" + path + "' has no rows");
  QTable table(max_x + 1, max_y + 1);
  std::vector<bool> seen(static_cast<std::size_t>(table.width()) * table.height() * kGridActionCount,
                         false);
  for (const auto& e : entries) {
    table.set_value({e.x, e.y}, e.action, e.q);
    seen[(static_cast<std::size_t>(e.y) * table.width() + e.x) * kGridActionCount + e.action] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    raise(ErrorKind::Parse, "qtable '" + path + "' is missing (state, action) entries");
  return table;
}

QTablePolicy::QTablePolicy(const GridWorld& world, const QTable& table, double temperature)
    : world_(world), table_(table), temperature_(temperature) {
  if (!(temperature > 0)) raise(ErrorKind::Config, "temperature must be positive");
  if (table.width() != world.width() || table.height() != world.height())
    raise(ErrorKind::Config, "qtable dimensions do not match the environment");
}

std::vector<double> QTablePolicy::distribution(std::span<const Value> state) const {
  auto row = table_.row(world_.decode(state));
  double best = *std::max_element(row.begin(), row.end());
  std::vector<double> probs(row.size());
  double total = 0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    probs[a] = std::exp((row[a] - best) / temperature_);
    total += probs[a];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> QTablePolicy::scores(std::span<const Value> state) const {
  auto row = table_.row(world_.decode(state));
  return {row.begin(), row.end()};
}

std::vector<std::pair<Cell, LabelSet>> optimal_action_sets(const GridWorld& world,
                                                           const QTable& table, double tau,
                                                           ExtractionMode mode) {
  QTablePolicy policy(world, table);
  std::vector<std::pair<Cell, LabelSet>> out;
  for (std::size_t i = 0; i < world.cell_count(); ++i) {
    Cell cell = world.cell_at(i);
    if (world.is_terminal(cell)) continue;
    auto state = world.encode(cell);
    auto values = mode == ExtractionMode::QValues ? policy.scores(state) : policy.distribution(state);
    out.emplace_back(cell, action_set(values, tau));
  }
  return out;
}

DataSet dataset_from_action_sets(const GridWorld& world, const QTable& table, double tau,
                                 ExtractionMode mode) {
  std::vector<Instance> instances;
  for (const auto& [cell, labels] : optimal_action_sets(world, table, tau, mode))
    instances.push_back(Instance{world.encode(cell), labels});
  return DataSet(world.schema_ptr(), std::move(instances));
}

}  // namespace ruledist
