#ifndef RULEDIST_CORE_RULES_HPP
#define RULEDIST_CORE_RULES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/schema.hpp"

namespace ruledist {

// == and != apply to discrete features, <= and >= to continuous ones.
// Integer-valued coordinates are modelled as continuous, so both `X<=18`
// and `X=19` (a >=/<= pair, collapsed by the renderer) are expressible.
enum class Op { Eq, Ne, Le, Ge };

const char* op_name(Op op);

struct Condition {
  std::int32_t feature = 0;
  Op op = Op::Eq;
  Value value;  // symbol index for ==/!=, number for <=/>=

  bool operator==(const Condition&) const = default;
};

struct RuleStats {
  std::int64_t covered = 0;    // instances matched when the rule was scored
  std::int64_t positives = 0;  // matched instances whose label set contains the consequent
  double heuristic = 0.0;

  bool operator==(const RuleStats&) const = default;
};

struct Rule {
  std::vector<Condition> antecedent;  // empty = TRUE, matches everything
  int label = 0;                      // consequent
  RuleStats stats;

  bool is_default() const { return antecedent.empty(); }

  // Conditions sorted by (feature, op, value); two antecedents with the same
  // canonical form match exactly the same instances.
  std::vector<Condition> canonical_antecedent() const;
};

// Semantic equality: same consequent and same canonical antecedent.
// Stats are bookkeeping and deliberately excluded.
bool operator==(const Rule& a, const Rule& b);

// Throws ErrorKind::Schema on unknown features, operator/kind mismatches or
// out-of-range consequents.
void validate_rule(const FeatureSchema& schema, const Rule& rule);

bool condition_holds(const FeatureSchema& schema, const Condition& cond, std::span<const Value> values);
bool matches(const FeatureSchema& schema, const Rule& rule, std::span<const Value> values);

std::pair<DataSet, DataSet> coverage_split(const Rule& rule, const DataSet& data);

// Ordered decision list. The last rule must be the only one with an empty
// antecedent, so prediction is total.
class RuleList {
 public:
  RuleList(SchemaPtr schema, std::vector<Rule> rules);

  const FeatureSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  struct Prediction {
    int label;
    std::size_t rule_index;
  };

  // First-match semantics; always succeeds thanks to the default rule.
  Prediction predict(std::span<const Value> values) const;

  bool operator==(const RuleList& other) const;

 private:
  SchemaPtr schema_;
  std::vector<Rule> rules_;
};

// --- text format ---------------------------------------------------------
//
// One rule per line, numbered from 1:
//   1. IF X<=18 THEN Class=RIGHT
//   2. IF TRUE THEN Class=UP
// A >=v/<=v pair on the same feature and value is displayed as `=v`.

std::string render_condition(const FeatureSchema& schema, const Condition& cond);
std::string render_antecedent(const FeatureSchema& schema, const std::vector<Condition>& antecedent);
std::string render_rule(const FeatureSchema& schema, const Rule& rule);
std::string render_rulelist(const RuleList& list);

// Inverse of render_rulelist for a known schema. Stats are not part of the
// text format and come back zeroed.
RuleList parse_rulelist(const std::string& text, const SchemaPtr& schema);
std::vector<Condition> parse_antecedent(const FeatureSchema& schema, const std::string& text);

// --- structured format ---------------------------------------------------
//
// JSON document embedding the schema and preserving rule order and stats.

nlohmann::json rule_to_json(const FeatureSchema& schema, const Rule& rule);
Rule rule_from_json(const FeatureSchema& schema, const nlohmann::json& doc);

std::string rulelist_to_json_text(const RuleList& list);
RuleList rulelist_from_json_text(const std::string& text);

void save_rulelist(const RuleList& list, const std::string& path);
RuleList load_rulelist(const std::string& path);

}  // namespace ruledist

#endif
