#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/learner.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace ruledist;

namespace {

SchemaPtr mixed_schema() {
  return std::make_shared<FeatureSchema>(
      std::vector<Feature>{{"C", FeatureKind::Discrete, {"P", "Q", "R"}},
                           {"X", FeatureKind::Continuous, {}}},
      std::vector<std::string>{"A", "B"});
}

LabelSet labels(std::initializer_list<int> ls) {
  LabelSet out;
  for (int l : ls) out.add(l);
  return out;
}

DataSet twelve_instances() {
  auto schema = mixed_schema();
  std::vector<Instance> v = {
      {{symbol_value(0), number_value(1)}, labels({0})},
      {{symbol_value(0), number_value(2)}, labels({0, 1})},
      {{symbol_value(1), number_value(2)}, labels({1})},
      {{symbol_value(1), number_value(3)}, labels({0})},
      {{symbol_value(2), number_value(3)}, labels({0, 1})},
      {{symbol_value(2), number_value(1)}, labels({1})},
      {{symbol_value(0), number_value(4)}, labels({0})},
      {{symbol_value(1), number_value(4)}, labels({0, 1})},
      {{symbol_value(2), number_value(4)}, labels({1})},
      {{symbol_value(0), number_value(1)}, labels({0})},
      {{symbol_value(1), number_value(1)}, labels({1})},
      {{symbol_value(2), number_value(2)}, labels({0})},
  };
  return DataSet(schema, std::move(v));
}

double training_accuracy(const RuleList& list, const DataSet& data) {
  std::size_t hits = 0;
  for (const auto& inst : data.instances())
    if (inst.labels.contains(list.predict(inst.values).label)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("refine_candidates enumerates specializations") {
  LearnerConfig config;

  auto one_discrete = std::make_shared<FeatureSchema>(
      std::vector<Feature>{{"(1, 5)", FeatureKind::Discrete, {"NULL", "BRICK"}}},
      std::vector<std::string>{"JUMP", "RIGHT"});
  DataSet data(one_discrete, {Instance{{symbol_value(0)}, labels({0})},
                              Instance{{symbol_value(1)}, labels({1})}});
  config.operators = {Op::Eq};
  CHECK(refine_candidates(Rule{}, data, config).size() == 2);
  config.operators = {Op::Eq, Op::Ne};
  CHECK(refine_candidates(Rule{}, data, config).size() == 4);

  auto continuous = std::make_shared<FeatureSchema>(
      std::vector<Feature>{{"X", FeatureKind::Continuous, {}}}, std::vector<std::string>{"A", "B"});
  DataSet xs(continuous, {Instance{{number_value(0)}, labels({0})},
                          Instance{{number_value(1)}, labels({0})},
                          Instance{{number_value(19)}, labels({1})},
                          Instance{{number_value(1)}, labels({1})}});
  config.operators = {Op::Eq, Op::Ne, Op::Le, Op::Ge};
  auto candidates = refine_candidates(Rule{}, xs, config);
  CHECK(candidates.size() == 6);  // 3 distinct thresholds x 2 operators

  // thresholds come from the values the rule still covers, and a
  // (feature, operator) pair is not repeated within a mined antecedent
  Rule le1;
  le1.antecedent = {{0, Op::Le, number_value(1)}};
  auto narrowed = refine_candidates(le1, xs, config);
  CHECK(narrowed.size() == 2);  // covered values {0,1}: only >=0 and >=1 remain

  Rule full;
  full.antecedent = {{0, Op::Le, number_value(1)}};
  config.max_conditions = 1;
  CHECK_THROWS_AS(refine_candidates(full, xs, config), Error);
}

TEST_CASE("find_best_rule equals exhaustive search when the beam is wide enough") {
  DataSet data = twelve_instances();
  LearnerConfig config;
  config.max_conditions = 2;
  config.min_covered = 1;
  config.beam_width = 1000;  // larger than the candidate space: search is exact

  auto best = find_best_rule(data, config);
  REQUIRE(best.has_value());

  // Independent recount: for each antecedent, pick the majority consequent
  // (covered containment, then global containment, then label order) and
  // score it; the search must attain the maximum over the whole space.
  long long global[2] = {0, 0};
  for (const auto& inst : data.instances())
    for (int l = 0; l < 2; ++l)
      if (inst.labels.contains(l)) ++global[l];

  double best_score = -1;
  for (const auto& rule : oracles::enumerate_rules(data, 2)) {
    long long covered[2] = {0, 0};
    bool any = false;
    for (const auto& inst : data.instances()) {
      if (!matches(data.schema(), rule, inst.values)) continue;
      any = true;
      for (int l = 0; l < 2; ++l)
        if (inst.labels.contains(l)) ++covered[l];
    }
    if (!any) continue;
    int majority = covered[0] >= covered[1] ? 0 : 1;
    if (covered[0] == covered[1] && global[1] > global[0]) majority = 1;
    best_score = std::max(best_score, oracles::recount(data, rule, majority).wra_set);
  }
  CHECK(best->stats.heuristic == doctest::Approx(best_score).epsilon(1e-12));
}

TEST_CASE("find_best_rule respects min_covered and min_heuristic") {
  DataSet data = twelve_instances();
  LearnerConfig config;
  config.min_covered = 13;
  CHECK_FALSE(find_best_rule(data, config).has_value());

  config.min_covered = 1;
  config.min_heuristic = 0.5;  // above the wra_set ceiling
  CHECK_FALSE(find_best_rule(data, config).has_value());

  DataSet empty(data.schema_ptr(), {});
  config.min_heuristic = 0;
  CHECK_THROWS_AS(find_best_rule(empty, config), Error);
}

TEST_CASE("uniform-label data yields only the default rule") {
  auto schema = mixed_schema();
  std::vector<Instance> v(30, Instance{{symbol_value(0), number_value(1)}, labels({0})});
  DataSet data(schema, v);
  LearnerConfig config;
  config.min_covered = 5;
  RuleList list = learn(data, config);
  CHECK(list.size() == 1);
  CHECK(list.rules()[0].is_default());
  CHECK(list.rules()[0].label == 0);
}

TEST_CASE("seeded search keeps the seed as a prefix") {
  DataSet data = twelve_instances();
  LearnerConfig config;
  config.min_covered = 1;

  Rule seed;
  seed.antecedent = {{1, Op::Le, number_value(4)}};
  seed.label = 0;

  for (int trial = 0; trial < 5; ++trial) {
    auto best = find_best_rule(data, config, seed);
    REQUIRE(best.has_value());
    REQUIRE(best->antecedent.size() >= 1);
    CHECK(best->antecedent[0] == seed.antecedent[0]);
    config.max_conditions += 1;
  }
}

TEST_CASE("seeded search can tighten a bound from the seed prefix") {
  auto schema = std::make_shared<FeatureSchema>(
      std::vector<Feature>{{"X", FeatureKind::Continuous, {}}}, std::vector<std::string>{"A", "B"});
  // A on x<=2, B everywhere else; the seed already carries an (X, <=) bound,
  // and the only pure high-score rule under it tightens that same bound
  std::vector<Instance> v;
  for (int x = 0; x <= 15; ++x)
    v.push_back(Instance{{number_value(x)}, LabelSet::single(x <= 2 ? 0 : 1)});
  DataSet data(schema, v);

  Rule seed;
  seed.antecedent = {{0, Op::Le, number_value(9)}};
  seed.label = 0;

  LearnerConfig config;
  config.min_covered = 1;
  auto best = find_best_rule(data, config, seed);
  REQUIRE(best.has_value());
  REQUIRE(best->antecedent.size() == 2);
  CHECK(best->antecedent[0] == seed.antecedent[0]);
  CHECK(best->antecedent[1] == Condition{0, Op::Le, number_value(2)});
  CHECK(best->label == 0);
  CHECK(best->stats.covered == 3);
  CHECK(best->stats.positives == 3);
}

TEST_CASE("learn terminates, ends with a default rule and covers everything") {
  Rng rng(23);
  auto schema = mixed_schema();
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Instance> v;
    std::size_t n = 5 + rng.next_below(40);
    for (std::size_t i = 0; i < n; ++i) {
      LabelSet ls = LabelSet::single(static_cast<int>(rng.next_below(2)));
      if (rng.next_below(4) == 0) ls.add(static_cast<int>(rng.next_below(2)));
      v.push_back(Instance{{symbol_value(static_cast<std::int32_t>(rng.next_below(3))),
                            number_value(static_cast<double>(rng.next_below(6)))},
                           ls});
    }
    DataSet data(schema, v);
    LearnerConfig config;
    config.min_covered = 1 + static_cast<int>(rng.next_below(4));
    RuleList list = learn(data, config);
    CHECK(list.rules().back().is_default());
    for (const auto& inst : data.instances()) CHECK_NOTHROW(list.predict(inst.values));
  }
}

TEST_CASE("learn is deterministic") {
  DataSet data = twelve_instances();
  LearnerConfig config;
  config.min_covered = 2;
  RuleList a = learn(data, config);
  RuleList b = learn(data, config);
  CHECK(a == b);
  CHECK(rulelist_to_json_text(a) == rulelist_to_json_text(b));
}

TEST_CASE("consistent single-label data reaches 100% training accuracy") {
  LearnerConfig config;
  config.min_covered = 1;
  config.max_conditions = 16;
  config.beam_width = 10;

  // class = value of the discrete feature, pure rules exist per class
  {
    auto schema = std::make_shared<FeatureSchema>(
        std::vector<Feature>{{"C", FeatureKind::Discrete, {"P", "Q", "R"}},
                             {"X", FeatureKind::Continuous, {}}},
        std::vector<std::string>{"A", "B", "D"});
    Rng rng(31);
    std::vector<Instance> v;
    for (int i = 0; i < 60; ++i) {
      auto symbol = static_cast<std::int32_t>(rng.next_below(3));
      v.push_back(Instance{{symbol_value(symbol), number_value(static_cast<double>(rng.next_below(9)))},
                           LabelSet::single(symbol)});
    }
    DataSet data(schema, v);
    CHECK(training_accuracy(learn(data, config), data) == 1.0);
  }

  // xor-style labels: no single condition separates, two do
  {
    auto schema = std::make_shared<FeatureSchema>(
        std::vector<Feature>{{"X", FeatureKind::Continuous, {}}, {"Y", FeatureKind::Continuous, {}}},
        std::vector<std::string>{"A", "B"});
    std::vector<Instance> v;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int copies = 0; copies < 3; ++copies)
          v.push_back(Instance{{number_value(x), number_value(y)}, LabelSet::single(x ^ y)});
    DataSet data(schema, v);
    CHECK(training_accuracy(learn(data, config), data) == 1.0);
  }
}

TEST_CASE("significance threshold prunes weak rules") {
  // noise: labels independent of features, so any rule's covered
  // distribution matches the base distribution
  auto schema = mixed_schema();
  Rng rng(41);
  std::vector<Instance> v;
  for (int i = 0; i < 200; ++i)
    v.push_back(Instance{{symbol_value(static_cast<std::int32_t>(i % 3)),
                          number_value(static_cast<double>(rng.next_below(5)))},
                         LabelSet::single(static_cast<int>(rng.next_below(2)))});
  DataSet data(schema, v);
  LearnerConfig config;
  config.min_covered = 5;
  config.significance_threshold = 10.0;
  RuleList list = learn(data, config);
  CHECK(list.size() == 1);  // nothing clears the bar, only the default remains
}

TEST_CASE("config validation") {
  DataSet data = twelve_instances();
  LearnerConfig config;
  config.beam_width = 0;
  CHECK_THROWS_AS(learn(data, config), Error);
  config = LearnerConfig{};
  config.max_conditions = 0;
  CHECK_THROWS_AS(learn(data, config), Error);
  config = LearnerConfig{};
  config.operators = {};
  CHECK_THROWS_AS(learn(data, config), Error);
  config = LearnerConfig{};
  config.min_heuristic = -1;
  CHECK_THROWS_AS(learn(data, config), Error);
}
