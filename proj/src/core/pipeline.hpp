#ifndef RULEDIST_CORE_PIPELINE_HPP
#define RULEDIST_CORE_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/extraction.hpp"
#include "core/learner.hpp"
#include "core/rules.hpp"

namespace ruledist {

// A greedy actor that can be rolled out in an environment. The rng is only
// used to break exact ties.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual int act(std::span<const Value> state, Rng& rng) const = 0;
};

class RuleListAgent : public Agent {
 public:
  explicit RuleListAgent(const RuleList& list) : list_(list) {}
  int act(std::span<const Value> state, Rng&) const override { return list_.predict(state).label; }

 private:
  const RuleList& list_;
};

class GreedyPolicyAgent : public Agent {
 public:
  explicit GreedyPolicyAgent(const StochasticPolicy& policy) : policy_(policy) {}
  int act(std::span<const Value> state, Rng& rng) const override {
    return greedy_action(policy_.scores(state), rng);
  }

 private:
  const StochasticPolicy& policy_;
};

// --- phase 1 ---------------------------------------------------------------

struct Phase1Result {
  DataSet data;     // the extracted set-valued training set
  RuleList rules;
};

// record_trajectories -> build_dataset -> learn, end to end.
Phase1Result phase1_distill(const StochasticPolicy& policy, Environment& env,
                            const ExtractionConfig& extraction, const LearnerConfig& learner,
                            std::uint64_t seed);

// --- phase 2 ---------------------------------------------------------------

// States on which the rule list and the policy disagreed, bucketed by the
// rule that made the prediction. Instances in bucket i were matched first by
// rule i and carry the policy's near-optimal action set as their labels.
struct DisagreementSet {
  SchemaPtr schema;
  std::vector<std::vector<Instance>> buckets;  // one per rule of the list

  std::int64_t total() const;
};

// Rolls out the policy (greedy by default; set config.greedy = false to
// sample) and records every state where the rule list's prediction falls
// outside action_set(policy scores, tau).
DisagreementSet collect_disagreements(const StochasticPolicy& policy, Environment& env,
                                      const RuleList& list, const ExtractionConfig& config,
                                      std::uint64_t seed);

// Phase-1 rules with their refinements. A refined rule's children all keep
// its antecedent as a prefix and end with the original rule, so phase-1
// rules are expanded, never edited.
struct RefinementTree {
  RuleList phase1;
  std::vector<std::optional<std::vector<Rule>>> children;  // aligned with phase1.rules()
};

// Children spliced in place of their parents; identical to phase1 when
// nothing was refined.
RuleList flatten(const RefinementTree& tree);

struct RefineOptions {
  // Minimum rule coverage while mining refinements; also the smallest
  // disagreement bucket worth refining.
  int min_covered = 5;
  // When set, a rule's refinement is kept only if the flattened list with it
  // strictly improves the mean return over gate_episodes seeded rollouts.
  // A refinement that scores well on the balanced sample may still lose
  // return once executed (e.g. a child that loops on border states).
  Environment* gate_env = nullptr;
  std::int64_t gate_episodes = 100;
  std::int64_t gate_step_cap = 1000;
};

struct RefineNote {
  std::size_t rule_index = 0;
  std::int64_t bucket_size = 0;
  std::int64_t balanced_size = 0;
  bool refined = false;
  std::string detail;
};

struct RefineResult {
  RefinementTree tree;
  std::vector<RefineNote> notes;
};

// For each rule with a large enough bucket: balance the bucket with an
// equal-sized seeded sample of phase-1 instances that the rule classified
// correctly, then mine refinements seeded with the rule itself.
RefineResult refine(const RuleList& list, const DisagreementSet& disagreements,
                    const DataSet& phase1_data, const LearnerConfig& learner,
                    const RefineOptions& options, std::uint64_t seed);

// --- evaluation -------------------------------------------------------------

struct ReturnSummary {
  double mean = 0, median = 0, q25 = 0, q75 = 0, min = 0, max = 0;
};

ReturnSummary summarize(std::span<const double> values);

struct AgentResult {
  std::string name;
  std::vector<double> returns;  // undiscounted episodic cumulative rewards
  ReturnSummary summary;
};

struct EvaluationReport {
  std::int64_t episodes = 0;
  std::int64_t step_cap = 0;
  std::uint64_t seed = 0;
  std::string environment_json;  // environment config, embedded when known
  std::vector<AgentResult> agents;
};

// Greedy rollouts, one return per episode. Episode i replays the random
// stream (seed, i) for every agent, so starts are paired across agents.
EvaluationReport evaluate(const std::vector<std::pair<std::string, const Agent*>>& agents,
                          Environment& env, std::int64_t episodes, std::int64_t step_cap,
                          std::uint64_t seed);

// Single rollout from whatever start env.reset produces with the given rng.
double rollout_return(const Agent& agent, Environment& env, std::int64_t step_cap, Rng& rng);

// --- serialization ----------------------------------------------------------

// Text view with hierarchical numbering (1, 1.1, ..., 2).
std::string render_tree(const RefinementTree& tree);

std::string tree_to_json_text(const RefinementTree& tree);
RefinementTree tree_from_json_text(const std::string& text);
void save_tree(const RefinementTree& tree, const std::string& path);
RefinementTree load_tree(const std::string& path);

std::string report_to_text(const EvaluationReport& report);
std::string report_to_json_text(const EvaluationReport& report);
std::string report_to_csv(const EvaluationReport& report);  // one row per episode
void save_report(const EvaluationReport& report, const std::string& json_path);

}  // namespace ruledist

#endif
