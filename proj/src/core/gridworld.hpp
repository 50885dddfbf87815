#ifndef RULEDIST_CORE_GRIDWORLD_HPP
#define RULEDIST_CORE_GRIDWORLD_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/extraction.hpp"
#include "core/rng.hpp"
#include "core/schema.hpp"

namespace ruledist {

// Grid actions, matching the schema's label order.
enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kGridActionCount = 4;

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

struct GridConfig {
  int width = 20;
  int height = 20;
  double step_reward = -1;
  double mud_reward = -10;
  std::vector<Cell> mud;
};

// The default mud patch: a plus-shaped cross near the middle of the grid.
GridConfig muddy_grid_config();
GridConfig open_grid_config();  // no mud

GridConfig load_grid_config(const std::string& path);
void save_grid_config(const GridConfig& config, const std::string& path);
std::string grid_config_to_json(const GridConfig& config);

// Deterministic grid: X grows rightward, Y grows upward, the goal is the
// top-right cell. Moving off the border leaves the position unchanged but
// still costs a step. Entering a muddy cell costs mud_reward instead.
// Episodes terminate on entering the goal.
class GridWorld {
 public:
  explicit GridWorld(GridConfig config);

  const GridConfig& config() const { return config_; }
  int width() const { return config_.width; }
  int height() const { return config_.height; }
  Cell goal() const { return {config_.width - 1, config_.height - 1}; }

  const FeatureSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }

  bool in_bounds(Cell c) const;
  bool is_mud(Cell c) const;
  bool is_terminal(Cell c) const { return c == goal(); }

  struct Step {
    Cell next;
    double reward = 0;
    bool done = false;
  };

  // Pure transition; throws when stepping from the terminal state.
  Step step(Cell from, int action) const;

  std::vector<Value> encode(Cell c) const;
  Cell decode(std::span<const Value> values) const;

  std::size_t cell_index(Cell c) const { return static_cast<std::size_t>(c.y) * config_.width + c.x; }
  std::size_t cell_count() const { return static_cast<std::size_t>(config_.width) * config_.height; }
  Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index % config_.width), static_cast<int>(index / config_.width)};
  }

  // Uniform over non-mud, non-goal cells.
  Cell random_start(Rng& rng) const;
  // Uniform over non-goal cells, mud included. Used for exploring starts.
  Cell random_start_anywhere(Rng& rng) const;

 private:
  GridConfig config_;
  SchemaPtr schema_;
  std::vector<bool> mud_;
};

// Episodic adapter over the pure grid model.
class GridSession : public Environment {
 public:
  explicit GridSession(const GridWorld& world) : world_(world) {}

  const FeatureSchema& schema() const override { return world_.schema(); }
  SchemaPtr schema_ptr() const override { return world_.schema_ptr(); }

  EnvStep reset(Rng& rng) override;
  EnvStep step(int action) override;

  Cell current() const { return current_; }

 protected:
  EnvStep start_at(Cell c);
  const GridWorld& world_;

 private:
  Cell current_;
  bool active_ = false;
};

// Session pinned to one start cell, for reproducing single rollouts.
class FixedStartSession : public GridSession {
 public:
  FixedStartSession(const GridWorld& world, Cell start) : GridSession(world), start_(start) {}
  EnvStep reset(Rng& rng) override;

 private:
  Cell start_;
};

}  // namespace ruledist

#endif
