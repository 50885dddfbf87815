#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "core/dataset_io.hpp"
#include "core/error.hpp"

namespace ruledist {

using nlohmann::json;

Phase1Result phase1_distill(const StochasticPolicy& policy, Environment& env,
                            const ExtractionConfig& extraction, const LearnerConfig& learner,
                            std::uint64_t seed) {
  auto trajectories = record_trajectories(policy, env, extraction, seed);
  DataSet data = build_dataset(trajectories, env.schema_ptr(), extraction.tau);
  RuleList rules = learn(data, learner);
  return Phase1Result{std::move(data), std::move(rules)};
}

std::int64_t DisagreementSet::total() const {
  std::int64_t n = 0;
  for (const auto& bucket : buckets) n += static_cast<std::int64_t>(bucket.size());
  return n;
}

DisagreementSet collect_disagreements(const StochasticPolicy& policy, Environment& env,
                                      const RuleList& list, const ExtractionConfig& config,
                                      std::uint64_t seed) {
  validate_extraction(config);
  DisagreementSet out;
  out.schema = list.schema_ptr();
  out.buckets.resize(list.size());
  for (std::int64_t ep = 0; ep < config.episodes; ++ep) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(ep));
    EnvStep initial = env.reset(rng);
    if (initial.done) continue;
    std::vector<Value> state = std::move(initial.state);
    for (std::int64_t t = 0; t < config.step_cap; ++t) {
      std::vector<double> raw = config.mode == ExtractionMode::QValues ? policy.scores(state)
                                                                       : policy.distribution(state);
      LabelSet near_optimal = action_set(raw, config.tau);
      RuleList::Prediction prediction = list.predict(state);
      if (!near_optimal.contains(prediction.label))
        out.buckets[prediction.rule_index].push_back(Instance{state, near_optimal});
      int action = config.greedy ? greedy_action(policy.scores(state), rng)
                                 : static_cast<int>(rng.sample_weighted(policy.distribution(state)));
      EnvStep step = env.step(action);
      state = std::move(step.state);
      if (step.done) break;
    }
  }
  return out;
}

RuleList flatten(const RefinementTree& tree) {
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < tree.phase1.size(); ++i) {
    if (i < tree.children.size() && tree.children[i]) {
      for (const auto& child : *tree.children[i]) rules.push_back(child);
    } else {
      rules.push_back(tree.phase1.rules()[i]);
    }
  }
  return RuleList(tree.phase1.schema_ptr(), std::move(rules));
}

RefineResult refine(const RuleList& list, const DisagreementSet& disagreements,
                    const DataSet& phase1_data, const LearnerConfig& learner,
                    const RefineOptions& options, std::uint64_t seed) {
  if (disagreements.buckets.size() != list.size())
    raise(ErrorKind::InvalidArgument, "refine: disagreement buckets do not match the rule list");
  if (options.min_covered < 1) raise(ErrorKind::Config, "refine: min_covered must be positive");

  // Which phase-1 instance fired which rule, for the balancing pools.
  std::vector<std::vector<Instance>> correct_pool(list.size());
  for (const auto& inst : phase1_data.instances()) {
    RuleList::Prediction p = list.predict(inst.values);
    if (inst.labels.contains(p.label)) correct_pool[p.rule_index].push_back(inst);
  }

  LearnerConfig mining = learner;
  mining.min_covered = options.min_covered;

  // Mean return of a candidate list over the gate's paired episode batch.
  auto gate_score = [&](const RuleList& candidate) {
    RuleListAgent agent(candidate);
    std::vector<double> returns;
    for (std::int64_t ep = 0; ep < options.gate_episodes; ++ep) {
      Rng rng = Rng::derive(seed ^ 0x9a7e, static_cast<std::uint64_t>(ep));
      returns.push_back(rollout_return(agent, *options.gate_env, options.gate_step_cap, rng));
    }
    return summarize(returns).mean;
  };
  double incumbent_score = 0;
  if (options.gate_env) incumbent_score = gate_score(list);

  RefineResult out{RefinementTree{list, {}}, {}};
  out.tree.children.resize(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& bucket = disagreements.buckets[i];
    RefineNote note;
    note.rule_index = i;
    note.bucket_size = static_cast<std::int64_t>(bucket.size());
    if (bucket.empty()) {
      note.detail = "no disagreements";
      out.notes.push_back(std::move(note));
      continue;
    }
    if (static_cast<int>(bucket.size()) < options.min_covered) {
      note.detail = "bucket below min_covered, skipped";
      out.notes.push_back(std::move(note));
      continue;
    }

    // Balance the bucket with an equal-sized sample of states the rule got
    // right. The sample carries the rule's consequent as its label, not the
    // full near-optimal set: the full sets contain the bucket's actions too,
    // and a heuristic computed on them cannot separate the two sides.
    std::vector<Instance> balanced = bucket;
    Rng rng = Rng::derive(seed, i);
    const auto& pool = correct_pool[i];
    std::size_t take = std::min(bucket.size(), pool.size());
    for (std::size_t j : rng.sample_without_replacement(pool.size(), take))
      balanced.push_back(Instance{pool[j].values, LabelSet::single(list.rules()[i].label)});
    note.balanced_size = static_cast<std::int64_t>(balanced.size());

    const Rule& original = list.rules()[i];
    DataSet training(phase1_data.schema_ptr(), std::move(balanced));
    std::vector<Rule> mined = mine_rules(training, mining, original);
    std::erase_if(mined, [&](const Rule& r) {
      return r.canonical_antecedent() == original.canonical_antecedent();
    });
    if (mined.empty()) {
      note.detail = "no refinement found";
      out.notes.push_back(std::move(note));
      continue;
    }
    mined.push_back(original);
    out.tree.children[i] = std::move(mined);
    if (options.gate_env) {
      double candidate_score = gate_score(flatten(out.tree));
      if (!(candidate_score > incumbent_score)) {
        out.tree.children[i].reset();
        note.detail = "refinement did not improve rollout return, dropped";
        out.notes.push_back(std::move(note));
        continue;
      }
      incumbent_score = candidate_score;
    }
    note.refined = true;
    note.detail = "refined";
    out.notes.push_back(std::move(note));
  }
  return out;
}

ReturnSummary summarize(std::span<const double> values) {
  if (values.empty()) raise(ErrorKind::InvalidArgument, "summarize: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    double h = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(h);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  ReturnSummary s;
  double total = 0;
  for (double v : sorted) total += v;
  s.mean = total / static_cast<double>(sorted.size());
  s.median = quantile(0.5);
  s.q25 = quantile(0.25);
  s.q75 = quantile(0.75);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

double rollout_return(const Agent& agent, Environment& env, std::int64_t step_cap, Rng& rng) {
  EnvStep current = env.reset(rng);
  double total = 0;
  for (std::int64_t t = 0; t < step_cap && !current.done; ++t) {
    current = env.step(agent.act(current.state, rng));
    total += current.reward;
  }
  return total;
}

EvaluationReport evaluate(const std::vector<std::pair<std::string, const Agent*>>& agents,
                          Environment& env, std::int64_t episodes, std::int64_t step_cap,
                          std::uint64_t seed) {
  if (episodes < 1) raise(ErrorKind::Config, "evaluate: episodes must be positive");
  if (step_cap < 1) raise(ErrorKind::Config, "evaluate: step_cap must be positive");
  EvaluationReport report;
  report.episodes = episodes;
  report.step_cap = step_cap;
  report.seed = seed;
  for (const auto& [name, agent] : agents) {
    AgentResult result;
    result.name = name;
    for (std::int64_t ep = 0; ep < episodes; ++ep) {
      Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(ep));
      result.returns.push_back(rollout_return(*agent, env, step_cap, rng));
    }
    result.summary = summarize(result.returns);
    report.agents.push_back(std::move(result));
  }
  return report;
}

// --- serialization ----------------------------------------------------------

std::string render_tree(const RefinementTree& tree) {
  std::ostringstream out;
  const FeatureSchema& schema = tree.phase1.schema();
  for (std::size_t i = 0; i < tree.phase1.size(); ++i) {
    out << (i + 1) << ". " << render_rule(schema, tree.phase1.rules()[i]) << '\n';
    if (i < tree.children.size() && tree.children[i]) {
      const auto& children = *tree.children[i];
      for (std::size_t j = 0; j < children.size(); ++j)
        out << "   " << (i + 1) << '.' << (j + 1) << ". " << render_rule(schema, children[j])
            << '\n';
    }
  }
  return out.str();
}

std::string tree_to_json_text(const RefinementTree& tree) {
  const FeatureSchema& schema = tree.phase1.schema();
  json rules = json::array();
  for (std::size_t i = 0; i < tree.phase1.size(); ++i) {
    json rule = rule_to_json(schema, tree.phase1.rules()[i]);
    rule["phase"] = 1;
    if (i < tree.children.size() && tree.children[i]) {
      json children = json::array();
      for (const auto& child : *tree.children[i]) {
        json c = rule_to_json(schema, child);
        c["phase"] = 2;
        c["parent"] = i + 1;
        children.push_back(c);
      }
      rule["children"] = children;
    }
    rules.push_back(rule);
  }
  json doc;
  doc["schema"] = json::parse(schema_to_json(schema));
  doc["rules"] = rules;
  return doc.dump(2) + "\n";
}

RefinementTree tree_from_json_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) raise(ErrorKind::Parse, "refinement tree: invalid JSON");
  SchemaPtr schema = parse_schema_json(doc.at("schema").dump());
  std::vector<Rule> phase1;
  std::vector<std::optional<std::vector<Rule>>> children;
  for (const auto& r : doc.at("rules")) {
    phase1.push_back(rule_from_json(*schema, r));
    if (r.contains("children")) {
      std::vector<Rule> kids;
      for (const auto& c : r["children"]) kids.push_back(rule_from_json(*schema, c));
      children.emplace_back(std::move(kids));
    } else {
      children.emplace_back(std::nullopt);
    }
  }
  return RefinementTree{RuleList(schema, std::move(phase1)), std::move(children)};
}

void save_tree(const RefinementTree& tree, const std::string& path) {
  write_text_file(path, tree_to_json_text(tree));
}

RefinementTree load_tree(const std::string& path) {
  try {
    return tree_from_json_text(read_text_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    raise(e.kind(), std::string(e.what()) + " (in '" + path + "')");
  }
}

std::string report_to_text(const EvaluationReport& report) {
  std::ostringstream out;
  out << "episodes: " << report.episodes << "  step_cap: " << report.step_cap
      << "  seed: " << report.seed << "\n\n";
  out << std::left << std::setw(20) << "agent" << std::right << std::setw(10) << "mean"
      << std::setw(10) << "median" << std::setw(10) << "q25" << std::setw(10) << "q75"
      << std::setw(10) << "min" << std::setw(10) << "max" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& agent : report.agents) {
    const ReturnSummary& s = agent.summary;
    out << std::left << std::setw(20) << agent.name << std::right << std::setw(10) << s.mean
        << std::setw(10) << s.median << std::setw(10) << s.q25 << std::setw(10) << s.q75
        << std::setw(10) << s.min << std::setw(10) << s.max << '\n';
  }
  return out.str();
}

std::string report_to_json_text(const EvaluationReport& report) {
  json doc;
  doc["config"] = {{"episodes", report.episodes}, {"step_cap", report.step_cap}, {"seed", report.seed}};
  if (!report.environment_json.empty())
    doc["config"]["environment"] = json::parse(report.environment_json);
  json agents = json::array();
  for (const auto& agent : report.agents) {
    json a;
    a["name"] = agent.name;
    a["returns"] = agent.returns;
    a["summary"] = {{"mean", agent.summary.mean},     {"median", agent.summary.median},
                    {"q25", agent.summary.q25},       {"q75", agent.summary.q75},
                    {"min", agent.summary.min},       {"max", agent.summary.max}};
    agents.push_back(a);
  }
  doc["agents"] = agents;
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "episode";
  for (const auto& agent : report.agents) out << ',' << agent.name;
  out << '\n';
  for (std::int64_t ep = 0; ep < report.episodes; ++ep) {
    out << ep;
    for (const auto& agent : report.agents)
      out << ',' << format_double(agent.returns[static_cast<std::size_t>(ep)]);
    out << '\n';
  }
  return out.str();
}

void save_report(const EvaluationReport& report, const std::string& json_path) {
  write_text_file(json_path, report_to_json_text(report));
}

}  // namespace ruledist
