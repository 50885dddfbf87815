#ifndef RULEDIST_CORE_QLEARN_HPP
#define RULEDIST_CORE_QLEARN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/extraction.hpp"
#include "core/gridworld.hpp"

namespace ruledist {

// Tabular action-value function over grid cells. Terminal cells keep all
// values at zero.
class QTable {
 public:
  QTable(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  double value(Cell c, int action) const { return rows_[index(c)][action]; }
  void set_value(Cell c, int action, double v) { rows_[index(c)][action] = v; }
  const std::array<double, kGridActionCount>& row(Cell c) const { return rows_[index(c)]; }

  double max_value(Cell c) const;

  bool operator==(const QTable&) const = default;

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  int width_ = 0;
  int height_ = 0;
  std::vector<std::array<double, kGridActionCount>> rows_;
};

struct TrainParams {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon = 0.1;
  // 120k episodes put max_a Q within ~1e-5 of the exact values on the
  // default 20x20 world; 20k leaves mud cells off by whole units.
  std::int64_t episodes = 120000;
  std::int64_t step_cap = 100000;
  // Start training episodes anywhere (mud included) so rarely visited cells
  // converge too; evaluation episodes still start on clean cells.
  bool exploring_starts = true;
};

void validate_train(const TrainParams& params);

// One-step Q-learning with epsilon-greedy behaviour, reproducible per seed.
QTable q_learn(const GridWorld& world, const TrainParams& params, std::uint64_t seed);

// Text persistence: tab-separated (x, y, action, q) rows.
void save_qtable(const QTable& table, const std::string& path);
QTable load_qtable(const std::string& path);

// Stochastic view over a Q-table: distribution() is a Boltzmann softmax of
// the action values, scores() the raw values.
class QTablePolicy : public StochasticPolicy {
 public:
  QTablePolicy(const GridWorld& world, const QTable& table, double temperature = 1.0);

  std::vector<double> distribution(std::span<const Value> state) const override;
  std::vector<double> scores(std::span<const Value> state) const override;

 private:
  const GridWorld& world_;
  const QTable& table_;
  double temperature_;
};

// Near-optimal action set per non-terminal cell, in row-major cell order.
std::vector<std::pair<Cell, LabelSet>> optimal_action_sets(const GridWorld& world,
                                                           const QTable& table, double tau,
                                                           ExtractionMode mode);

// One instance per non-terminal cell, labelled with its near-optimal
// actions. The exhaustive counterpart of trajectory recording for tabular
// policies.
DataSet dataset_from_action_sets(const GridWorld& world, const QTable& table, double tau,
                                 ExtractionMode mode);

}  // namespace ruledist

#endif
