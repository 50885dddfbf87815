#include "core/gridworld.hpp"

#include <json.hpp>

#include "core/dataset_io.hpp"
#include "core/error.hpp"

namespace ruledist {

using nlohmann::json;

GridConfig muddy_grid_config() {
  GridConfig config;
  config.mud = {{9, 10}, {8, 10}, {10, 10}, {9, 9}, {9, 11}};
  return config;
}

GridConfig open_grid_config() { return GridConfig{}; }

GridConfig load_grid_config(const std::string& path) {
  json doc = json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded()) raise(ErrorKind::Parse, "environment config '" + path + "': invalid JSON");
  GridConfig config;
  config.width = doc.value("width", 20);
  config.height = doc.value("height", 20);
  config.step_reward = doc.value("step_reward", -1.0);
  config.mud_reward = doc.value("mud_reward", -10.0);
  if (doc.contains("mud")) {
    for (const auto& cell : doc["mud"]) {
      if (!cell.is_array() || cell.size() != 2)
        raise(ErrorKind::Parse, "environment config '" + path + "': mud cells must be [x, y] pairs");
      config.mud.push_back({cell[0].get<int>(), cell[1].get<int>()});
    }
  }
  return config;
}

std::string grid_config_to_json(const GridConfig& config) {
  json doc;
  doc["width"] = config.width;
  doc["height"] = config.height;
  doc["step_reward"] = config.step_reward;
  doc["mud_reward"] = config.mud_reward;
  json mud = json::array();
  for (const auto& cell : config.mud) mud.push_back({cell.x, cell.y});
  doc["mud"] = mud;
  return doc.dump(2) + "\n";
}

void save_grid_config(const GridConfig& config, const std::string& path) {
  write_text_file(path, grid_config_to_json(config));
}

GridWorld::GridWorld(GridConfig config) : config_(std::move(config)) {
  if (config_.width < 2 || config_.height < 2)
    raise(ErrorKind::Config, "grid must be at least 2x2");
  schema_ = std::make_shared<FeatureSchema>(
      std::vector<Feature>{{"X", FeatureKind::Continuous, {}}, {"Y", FeatureKind::Continuous, {}}},
      std::vector<std::string>{"UP", "DOWN", "LEFT", "RIGHT"});
  mud_.assign(cell_count(), false);
  for (const auto& cell : config_.mud) {
    if (!in_bounds(cell)) raise(ErrorKind::Config, "mud cell outside the grid");
    if (cell == goal()) raise(ErrorKind::Config, "the goal cell cannot be muddy");
    mud_[cell_index(cell)] = true;
  }
}

bool GridWorld::in_bounds(Cell c) const {
  return c.x >= 0 && c.x < config_.width && c.y >= 0 && c.y < config_.height;
}

bool GridWorld::is_mud(Cell c) const { return mud_[cell_index(c)]; }

GridWorld::Step GridWorld::step(Cell from, int action) const {
  if (!in_bounds(from)) raise(ErrorKind::InvalidArgument, "step: state outside the grid");
  if (is_terminal(from)) raise(ErrorKind::State, "step: episode already terminated");
  Cell next = from;
  switch (action) {
    case kUp: next.y += 1; break;
    case kDown: next.y -= 1; break;
    case kLeft: next.x -= 1; break;
    case kRight: next.x += 1; break;
    default: raise(ErrorKind::InvalidArgument, "step: unknown action");
  }
  if (!in_bounds(next)) next = from;  // bump against the border
  Step out;
  out.next = next;
  out.reward = is_mud(next) ? config_.mud_reward : config_.step_reward;
  out.done = is_terminal(next);
  return out;
}

std::vector<Value> GridWorld::encode(Cell c) const {
  return {number_value(static_cast<double>(c.x)), number_value(static_cast<double>(c.y))};
}

Cell GridWorld::decode(std::span<const Value> values) const {
  check_values(*schema_, values);
  Cell c{static_cast<int>(std::get<double>(values[0])), static_cast<int>(std::get<double>(values[1]))};
  if (!in_bounds(c)) raise(ErrorKind::Schema, "state outside the grid");
  return c;
}

Cell GridWorld::random_start(Rng& rng) const {
  for (;;) {
    Cell c = cell_at(rng.next_below(cell_count()));
    if (!is_terminal(c) && !is_mud(c)) return c;
  }
}

Cell GridWorld::random_start_anywhere(Rng& rng) const {
  for (;;) {
    Cell c = cell_at(rng.next_below(cell_count()));
    if (!is_terminal(c)) return c;
  }
}

EnvStep GridSession::start_at(Cell c) {
  current_ = c;
  active_ = !world_.is_terminal(c);
  return EnvStep{world_.encode(c), 0, !active_};
}

EnvStep GridSession::reset(Rng& rng) { return start_at(world_.random_start(rng)); }

EnvStep GridSession::step(int action) {
  if (!active_) raise(ErrorKind::State, "step before reset or after termination");
  GridWorld::Step s = world_.step(current_, action);
  current_ = s.next;
  if (s.done) active_ = false;
  return EnvStep{world_.encode(s.next), s.reward, s.done};
}

EnvStep FixedStartSession::reset(Rng& rng) {
  (void)rng;
  return start_at(start_);
}

}  // namespace ruledist
