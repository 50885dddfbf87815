#ifndef RULEDIST_CORE_EXTRACTION_HPP
#define RULEDIST_CORE_EXTRACTION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/schema.hpp"

namespace ruledist {

// A policy that exposes a probability distribution over the schema's labels,
// and optionally raw preference scores (e.g. action values) behind it.
class StochasticPolicy {
 public:
  virtual ~StochasticPolicy() = default;

  // One probability per label, summing to 1.
  virtual std::vector<double> distribution(std::span<const Value> state) const = 0;

  // Raw per-action scores; defaults to the distribution itself.
  virtual std::vector<double> scores(std::span<const Value> state) const {
    return distribution(state);
  }
};

struct EnvStep {
  std::vector<Value> state;
  double reward = 0;
  bool done = false;
};

// Episodic environment producing symbolic states directly.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const FeatureSchema& schema() const = 0;
  virtual SchemaPtr schema_ptr() const = 0;
  // Starts a new episode: the initial state, reward 0, and done when the
  // start is already terminal (possible with pinned starts).
  virtual EnvStep reset(Rng& rng) = 0;
  // Advances the running episode. Throws once the episode has terminated.
  virtual EnvStep step(int action) = 0;
};

enum class ExtractionMode {
  Distribution,  // record the policy's probabilities
  QValues,       // record its raw scores instead
};

struct ExtractionConfig {
  double tau = 0.9;              // near-optimality tolerance, in (0, 1]
  std::int64_t episodes = 50;
  ExtractionMode mode = ExtractionMode::Distribution;
  std::int64_t step_cap = 1000;  // episodes longer than this are truncated
  bool greedy = false;           // act on the argmax instead of sampling
};

void validate_extraction(const ExtractionConfig& config);

// Labels whose score reaches tau times the best score. Scores with negative
// entries are first shifted by their minimum so the proportional threshold
// stays meaningful for raw action values. Never empty: the argmax always
// qualifies, and a constant score vector selects every action.
LabelSet action_set(std::span<const double> scores, double tau);

// Indices attaining the exact maximum.
std::vector<int> argmax_set(std::span<const double> scores);
// Uniform choice among the maxima.
int greedy_action(std::span<const double> scores, Rng& rng);

struct TrajectoryStep {
  std::vector<Value> state;
  std::vector<double> distribution;  // probabilities, or raw scores in QValues mode
  int action = 0;
  double reward = 0;
};

struct Trajectory {
  std::int64_t episode = 0;
  std::vector<TrajectoryStep> steps;
  bool truncated = false;  // hit the step cap before reaching a terminal state
};

// Runs `episodes` episodes acting on the policy (sampled, or argmax when
// greedy) and records state, distribution/scores, action and reward at every
// step. Episode i uses the random stream (seed, i), so recordings are
// reproducible and independent of episode order.
std::vector<Trajectory> record_trajectories(const StochasticPolicy& policy, Environment& env,
                                            const ExtractionConfig& config, std::uint64_t seed);

// One instance per recorded step; the label set is action_set(distribution, tau).
// Translation problems name the offending episode and step.
DataSet build_dataset(const std::vector<Trajectory>& trajectories, const SchemaPtr& schema,
                      double tau);

// Line-delimited trajectory files, the integration boundary for external
// policies. Tab-separated header and rows:
//   episode  step  <feature columns>  probs  action  reward  done
// with `probs` holding the `;`-joined distribution.
void save_trajectories(const std::vector<Trajectory>& trajectories, const FeatureSchema& schema,
                       const std::string& path);
std::vector<Trajectory> load_trajectories(const std::string& path, const SchemaPtr& schema);

}  // namespace ruledist

#endif
