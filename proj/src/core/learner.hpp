#ifndef RULEDIST_CORE_LEARNER_HPP
#define RULEDIST_CORE_LEARNER_HPP

#include <optional>
#include <vector>

#include "core/heuristics.hpp"
#include "core/rules.hpp"
#include "core/schema.hpp"

namespace ruledist {

struct LearnerConfig {
  int max_conditions = 5;
  int min_covered = 20;
  int beam_width = 10;
  Heuristic heuristic = Heuristic::WraSet;
  // A rule is accepted only when its heuristic is strictly above this.
  double min_heuristic = 0.0;
  // Operators the search may introduce.
  std::vector<Op> operators = {Op::Eq, Op::Ne, Op::Le, Op::Ge};
  // Likelihood-ratio cutoff for accepting a rule; 0 disables the test.
  double significance_threshold = 0.0;
};

void validate_config(const LearnerConfig& config);

// All single-condition specializations of `rule`: ==v / !=v per domain value
// of each discrete feature, <=t / >=t per distinct value observed for each
// continuous feature among the instances the rule covers. Conditions already
// present are not repeated, and each (feature, operator) pair is used at most
// once per rule. Throws when the rule is already at max_conditions.
std::vector<Rule> refine_candidates(const Rule& rule, const DataSet& data,
                                    const LearnerConfig& config);

// Beam search for the best rule by the configured heuristic. The consequent
// of every candidate is the majority class of the instances it covers.
// With `seed`, the search starts from the seed rule and keeps its antecedent
// as a fixed prefix (counting toward max_conditions); the seed's own
// (feature, operator) pairs may be reused by new conditions, which lets a
// bound such as X<=18 be tightened to X<=9 further down.
//
// Returns the best rule covering at least min_covered instances with a
// heuristic strictly above min_heuristic, or nullopt when no rule qualifies.
// Beam ordering and the best-rule choice break ties toward fewer conditions,
// then earlier generation, so results are deterministic.
std::optional<Rule> find_best_rule(const DataSet& data, const LearnerConfig& config,
                                   const std::optional<Rule>& seed = std::nullopt);

// Separate-and-conquer loop without the trailing default rule: mine a rule,
// drop the instances it covers, repeat until no rule qualifies or fewer than
// min_covered instances remain. Used directly by the refinement stage.
std::vector<Rule> mine_rules(const DataSet& data, const LearnerConfig& config,
                             const std::optional<Rule>& seed = std::nullopt);

// mine_rules plus the default rule predicting the majority class of the
// leftover instances (of the whole set when nothing is left over).
RuleList learn(const DataSet& data, const LearnerConfig& config);

}  // namespace ruledist

#endif
