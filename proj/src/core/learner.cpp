#include "core/learner.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_set>

#include "core/error.hpp"

namespace ruledist {

namespace {

bool op_enabled(const LearnerConfig& config, Op op) {
  return std::find(config.operators.begin(), config.operators.end(), op) != config.operators.end();
}

// Candidate rule during search, carrying the indices it covers so children
// only rescan the parent's cover.
struct Candidate {
  Rule rule;
  int mined_conditions = 0;  // beyond the seed prefix
  std::vector<std::uint32_t> cover;
  std::vector<std::int64_t> class_counts;  // containment per label over cover
  std::int64_t expanded_cover = 0;         // Σ label-set sizes over cover
  double lrs = 0;
  std::uint64_t generation = 0;
};

struct SearchContext {
  const DataSet& data;
  const LearnerConfig& config;
  std::size_t prefix_len = 0;
  std::vector<std::int64_t> global_counts = {};
  std::int64_t expanded_total = 0;
  std::uint64_t next_generation = 0;
};

void score(SearchContext& ctx, Candidate& cand) {
  const auto covered = static_cast<std::int64_t>(cand.cover.size());
  if (covered == 0) {
    cand.rule.label = 0;
    cand.rule.stats = {0, 0, 0.0};
    return;
  }
  int label = majority_class(cand.class_counts, ctx.global_counts);
  HeuristicCounts counts;
  counts.total = static_cast<std::int64_t>(ctx.data.size());
  counts.covered = covered;
  counts.pos_total = ctx.global_counts[label];
  counts.pos_covered = cand.class_counts[label];
  counts.neg_total = ctx.expanded_total - counts.pos_total;
  counts.neg_covered = cand.expanded_cover - counts.pos_covered;
  cand.rule.label = label;
  cand.rule.stats.covered = counts.covered;
  cand.rule.stats.positives = counts.pos_covered;
  cand.rule.stats.heuristic = heuristic_value(ctx.config.heuristic, counts);
  if (ctx.config.significance_threshold > 0)
    cand.lrs = likelihood_ratio(cand.class_counts, covered, ctx.global_counts, counts.total);
}

Candidate make_root(SearchContext& ctx, const Rule& seed) {
  Candidate root;
  root.rule = seed;
  root.rule.stats = {};
  root.generation = ctx.next_generation++;
  for (std::uint32_t i = 0; i < ctx.data.size(); ++i)
    if (matches(ctx.data.schema(), seed, ctx.data.instance(i).values)) root.cover.push_back(i);
  root.class_counts.assign(ctx.data.schema().label_count(), 0);
  for (std::uint32_t i : root.cover) {
    const LabelSet& labels = ctx.data.instance(i).labels;
    root.expanded_cover += labels.count();
    for (std::size_t c = 0; c < root.class_counts.size(); ++c)
      if (labels.contains(static_cast<int>(c))) ++root.class_counts[c];
  }
  score(ctx, root);
  return root;
}

Candidate specialize(SearchContext& ctx, const Candidate& parent, const Condition& cond) {
  Candidate child;
  child.rule.antecedent = parent.rule.antecedent;
  child.rule.antecedent.push_back(cond);
  child.mined_conditions = parent.mined_conditions + 1;
  child.generation = ctx.next_generation++;
  child.class_counts.assign(ctx.data.schema().label_count(), 0);
  for (std::uint32_t i : parent.cover) {
    const Instance& inst = ctx.data.instance(i);
    if (!condition_holds(ctx.data.schema(), cond, inst.values)) continue;
    child.cover.push_back(i);
    child.expanded_cover += inst.labels.count();
    for (std::size_t c = 0; c < child.class_counts.size(); ++c)
      if (inst.labels.contains(static_cast<int>(c))) ++child.class_counts[c];
  }
  score(ctx, child);
  return child;
}

// Specializing conditions in a deterministic order: features in schema
// order; per discrete feature, domain values with == before !=; per
// continuous feature, the distinct covered values ascending with <= before
// >=. A (feature, operator) pair already used among the mined conditions is
// skipped, as are conditions present verbatim anywhere in the rule.
std::vector<Condition> candidate_conditions(const SearchContext& ctx, const Candidate& parent) {
  const FeatureSchema& schema = ctx.data.schema();
  const auto& antecedent = parent.rule.antecedent;
  auto mined_pair_used = [&](std::int32_t feature, Op op) {
    for (std::size_t i = ctx.prefix_len; i < antecedent.size(); ++i)
      if (antecedent[i].feature == feature && antecedent[i].op == op) return true;
    return false;
  };
  auto exact_duplicate = [&](const Condition& cond) {
    return std::find(antecedent.begin(), antecedent.end(), cond) != antecedent.end();
  };

  std::vector<Condition> out;
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const Feature& feature = schema.feature(f);
    if (feature.kind == FeatureKind::Discrete) {
      for (Op op : {Op::Eq, Op::Ne}) {
        if (!op_enabled(ctx.config, op) || mined_pair_used(static_cast<std::int32_t>(f), op)) continue;
        for (std::size_t v = 0; v < feature.domain.size(); ++v) {
          Condition cond{static_cast<std::int32_t>(f), op, symbol_value(static_cast<std::int32_t>(v))};
          if (!exact_duplicate(cond)) out.push_back(cond);
        }
      }
    } else {
      std::vector<double> thresholds;
      thresholds.reserve(parent.cover.size());
      for (std::uint32_t i : parent.cover)
        thresholds.push_back(std::get<double>(ctx.data.instance(i).values[f]));
      std::sort(thresholds.begin(), thresholds.end());
      thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
      for (double t : thresholds) {
        for (Op op : {Op::Le, Op::Ge}) {
          if (!op_enabled(ctx.config, op) || mined_pair_used(static_cast<std::int32_t>(f), op)) continue;
          Condition cond{static_cast<std::int32_t>(f), op, number_value(t)};
          if (!exact_duplicate(cond)) out.push_back(cond);
        }
      }
    }
  }
  return out;
}

// Hashable key of the canonical antecedent, to drop condition-order
// permutations of one rule within a beam layer.
std::string antecedent_key(const Rule& rule) {
  auto canonical = rule.canonical_antecedent();
  std::string key;
  key.reserve(canonical.size() * 13);
  for (const auto& cond : canonical) {
    char buf[13];
    std::memcpy(buf, &cond.feature, 4);
    buf[4] = static_cast<char>(cond.op);
    if (const auto* sym = std::get_if<std::int32_t>(&cond.value)) {
      std::uint64_t bits = 0x8000000000000000ULL | static_cast<std::uint32_t>(*sym);
      std::memcpy(buf + 5, &bits, 8);
    } else {
      double d = std::get<double>(cond.value);
      std::memcpy(buf + 5, &d, 8);
    }
    key.append(buf, sizeof buf);
  }
  return key;
}

bool acceptable(const SearchContext& ctx, const Candidate& cand) {
  if (static_cast<int>(cand.cover.size()) < ctx.config.min_covered) return false;
  if (!(cand.rule.stats.heuristic > ctx.config.min_heuristic)) return false;
  if (ctx.config.significance_threshold > 0 && cand.lrs < ctx.config.significance_threshold)
    return false;
  return true;
}

// Strict ordering used both for the beam and for the incumbent best rule:
// higher heuristic, then fewer conditions, then earlier generation.
bool better(const Candidate& a, const Candidate& b) {
  if (a.rule.stats.heuristic != b.rule.stats.heuristic)
    return a.rule.stats.heuristic > b.rule.stats.heuristic;
  if (a.rule.antecedent.size() != b.rule.antecedent.size())
    return a.rule.antecedent.size() < b.rule.antecedent.size();
  return a.generation < b.generation;
}

}  // namespace

void validate_config(const LearnerConfig& config) {
  if (config.max_conditions < 1) raise(ErrorKind::Config, "max_conditions must be positive");
  if (config.min_covered < 1) raise(ErrorKind::Config, "min_covered must be positive");
  if (config.beam_width < 1) raise(ErrorKind::Config, "beam_width must be positive");
  if (config.min_heuristic < 0) raise(ErrorKind::Config, "min_heuristic must be nonnegative");
  if (config.operators.empty()) raise(ErrorKind::Config, "operator set must be nonempty");
  if (config.significance_threshold < 0)
    raise(ErrorKind::Config, "significance_threshold must be nonnegative");
}

std::vector<Rule> refine_candidates(const Rule& rule, const DataSet& data,
                                    const LearnerConfig& config) {
  validate_config(config);
  validate_rule(data.schema(), rule);
  if (static_cast<int>(rule.antecedent.size()) >= config.max_conditions)
    raise(ErrorKind::InvalidArgument, "refine_candidates: rule is already at max_conditions");
  SearchContext ctx{data, config};
  ctx.global_counts = data.label_containment_counts();
  ctx.expanded_total = data.total_label_count();
  Candidate parent = make_root(ctx, rule);
  std::vector<Rule> out;
  for (const Condition& cond : candidate_conditions(ctx, parent)) {
    Rule specialized;
    specialized.antecedent = parent.rule.antecedent;
    specialized.antecedent.push_back(cond);
    specialized.label = rule.label;
    out.push_back(std::move(specialized));
  }
  return out;
}

std::optional<Rule> find_best_rule(const DataSet& data, const LearnerConfig& config,
                                   const std::optional<Rule>& seed) {
  validate_config(config);
  if (data.empty()) raise(ErrorKind::EmptyDataset, "find_best_rule: empty dataset");
  if (seed) validate_rule(data.schema(), *seed);

  SearchContext ctx{data, config};
  ctx.prefix_len = seed ? seed->antecedent.size() : 0;
  ctx.global_counts = data.label_containment_counts();
  ctx.expanded_total = data.total_label_count();

  Candidate root = make_root(ctx, seed ? *seed : Rule{});
  std::optional<Candidate> best;
  if (acceptable(ctx, root)) best = root;

  std::vector<Candidate> star;
  star.push_back(std::move(root));

  while (!star.empty()) {
    std::vector<Candidate> next_star;
    std::unordered_set<std::string> seen;
    for (const Candidate& parent : star) {
      if (static_cast<int>(parent.rule.antecedent.size()) >= config.max_conditions) continue;
      for (const Condition& cond : candidate_conditions(ctx, parent)) {
        Candidate child = specialize(ctx, parent, cond);
        // A child below min_covered can never recover coverage; drop it.
        if (static_cast<int>(child.cover.size()) < config.min_covered) continue;
        if (!seen.insert(antecedent_key(child.rule)).second) continue;
        if (acceptable(ctx, child) && (!best || better(child, *best))) best = child;
        next_star.push_back(std::move(child));
      }
    }
    std::stable_sort(next_star.begin(), next_star.end(), better);
    if (static_cast<int>(next_star.size()) > config.beam_width)
      next_star.resize(config.beam_width);
    star = std::move(next_star);
  }
  if (!best) return std::nullopt;
  return best->rule;
}

std::vector<Rule> mine_rules(const DataSet& data, const LearnerConfig& config,
                             const std::optional<Rule>& seed) {
  validate_config(config);
  if (data.empty()) raise(ErrorKind::EmptyDataset, "mine_rules: empty dataset");
  std::vector<Rule> rules;
  DataSet remaining = data;
  while (static_cast<int>(remaining.size()) >= config.min_covered) {
    auto rule = find_best_rule(remaining, config, seed);
    if (!rule) break;
    rules.push_back(*rule);
    remaining = coverage_split(*rule, remaining).second;
  }
  return rules;
}

RuleList learn(const DataSet& data, const LearnerConfig& config) {
  validate_config(config);
  if (data.empty()) raise(ErrorKind::EmptyDataset, "learn: empty dataset");

  std::vector<Rule> rules;
  DataSet remaining = data;
  while (static_cast<int>(remaining.size()) >= config.min_covered) {
    auto rule = find_best_rule(remaining, config);
    if (!rule) break;
    rules.push_back(*rule);
    remaining = coverage_split(*rule, remaining).second;
  }

  const DataSet& leftover = remaining.empty() ? data : remaining;
  Rule fallback;
  fallback.label = majority_class(leftover, data);
  fallback.stats.covered = static_cast<std::int64_t>(leftover.size());
  fallback.stats.positives = leftover.label_containment_counts()[fallback.label];
  rules.push_back(std::move(fallback));
  return RuleList(data.schema_ptr(), std::move(rules));
}

}  // namespace ruledist
