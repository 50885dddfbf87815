#include "ruledist.h"

#include <cstring>
#include <sstream>
#include <string>

#include "core/dataset_io.hpp"
#include "core/error.hpp"
#include "core/extraction.hpp"
#include "core/gridworld.hpp"
#include "core/learner.hpp"
#include "core/pipeline.hpp"
#include "core/qlearn.hpp"
#include "core/rules.hpp"

using namespace ruledist;

struct rd_world {
  GridWorld world;
};
struct rd_qtable {
  QTable table;
};
struct rd_dataset {
  DataSet data;
};
struct rd_rulelist {
  RuleList list;
};
struct rd_tree {
  RefinementTree tree;
};
struct rd_report {
  EvaluationReport report;
};
struct rd_eval {
  const rd_world* world;
  std::int64_t episodes;
  std::int64_t step_cap;
  std::uint64_t seed;
  // Borrowed handles; owners must outlive rd_eval_run.
  std::vector<std::pair<std::string, const rd_qtable*>> qtables;
  std::vector<std::pair<std::string, const rd_rulelist*>> rulelists;
  std::vector<std::pair<std::size_t, int>> order;  // (index per kind, kind)
};

namespace {

thread_local std::string g_last_error;

rd_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return RD_E_INVALID_ARGUMENT;
    case ErrorKind::Config: return RD_E_CONFIG;
    case ErrorKind::Schema: return RD_E_SCHEMA;
    case ErrorKind::Parse: return RD_E_PARSE;
    case ErrorKind::Io: return RD_E_IO;
    case ErrorKind::EmptyDataset: return RD_E_EMPTY_DATASET;
    case ErrorKind::State: return RD_E_STATE;
  }
  return RD_E_UNKNOWN;
}

template <typename Fn>
rd_status wrap(Fn&& fn) {
  try {
    fn();
    return RD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RD_E_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return RD_E_UNKNOWN;
  }
}

rd_status fail_null(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return RD_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ExtractionConfig to_extraction(const rd_extract_params& p) {
  ExtractionConfig config;
  config.tau = p.tau;
  config.episodes = p.episodes;
  config.step_cap = p.step_cap;
  config.mode = p.use_q_values ? ExtractionMode::QValues : ExtractionMode::Distribution;
  config.greedy = p.greedy != 0;
  return config;
}

LearnerConfig to_learner(const rd_learn_params& p) {
  LearnerConfig config;
  config.max_conditions = p.max_conditions;
  config.min_covered = p.min_covered;
  config.beam_width = p.beam_width;
  config.heuristic = p.use_wra_set ? Heuristic::WraSet : Heuristic::Wra;
  config.min_heuristic = p.min_heuristic;
  config.significance_threshold = p.significance_threshold;
  if (p.operators) {
    config.operators.clear();
    std::istringstream in(p.operators);
    std::string token;
    while (std::getline(in, token, ',')) {
      if (token == "==" || token == "=") config.operators.push_back(Op::Eq);
      else if (token == "!=") config.operators.push_back(Op::Ne);
      else if (token == "<=") config.operators.push_back(Op::Le);
      else if (token == ">=") config.operators.push_back(Op::Ge);
      else raise(ErrorKind::Config, "unknown operator '" + token + "'");
    }
  }
  return config;
}

}  // namespace

extern "C" {

const char* rd_last_error(void) { return g_last_error.c_str(); }

const char* rd_status_name(rd_status status) {
  switch (status) {
    case RD_OK: return "ok";
    case RD_E_INVALID_ARGUMENT: return "invalid-argument";
    case RD_E_CONFIG: return "config";
    case RD_E_SCHEMA: return "schema";
    case RD_E_PARSE: return "parse";
    case RD_E_IO: return "io";
    case RD_E_EMPTY_DATASET: return "empty-dataset";
    case RD_E_STATE: return "state";
    case RD_E_UNKNOWN: return "unknown";
  }
  return "unknown";
}

void rd_string_free(char* text) { delete[] text; }

/* ---- environment -------------------------------------------------------- */

rd_status rd_world_create_muddy(rd_world** out) {
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_world{GridWorld(muddy_grid_config())}; });
}

rd_status rd_world_create_open(rd_world** out) {
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_world{GridWorld(open_grid_config())}; });
}

rd_status rd_world_load(const char* path, rd_world** out) {
  if (!path) return fail_null("path");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_world{GridWorld(load_grid_config(path))}; });
}

rd_status rd_world_save(const rd_world* world, const char* path) {
  if (!world) return fail_null("world");
  if (!path) return fail_null("path");
  return wrap([&] { save_grid_config(world->world.config(), path); });
}

rd_status rd_world_save_schema(const rd_world* world, const char* path) {
  if (!world) return fail_null("world");
  if (!path) return fail_null("path");
  return wrap([&] { save_schema(world->world.schema(), path); });
}

void rd_world_free(rd_world* world) { delete world; }

/* ---- Q-learning ---------------------------------------------------------- */

void rd_train_params_init(rd_train_params* params) {
  if (!params) return;
  TrainParams defaults;
  params->alpha = defaults.alpha;
  params->gamma = defaults.gamma;
  params->epsilon = defaults.epsilon;
  params->episodes = defaults.episodes;
  params->step_cap = defaults.step_cap;
  params->exploring_starts = defaults.exploring_starts ? 1 : 0;
}

rd_status rd_qtable_train(const rd_world* world, const rd_train_params* params, uint64_t seed,
                          rd_qtable** out) {
  if (!world) return fail_null("world");
  if (!params) return fail_null("params");
  if (!out) return fail_null("out");
  return wrap([&] {
    TrainParams tp;
    tp.alpha = params->alpha;
    tp.gamma = params->gamma;
    tp.epsilon = params->epsilon;
    tp.episodes = params->episodes;
    tp.step_cap = params->step_cap;
    tp.exploring_starts = params->exploring_starts != 0;
    *out = new rd_qtable{q_learn(world->world, tp, seed)};
  });
}

rd_status rd_qtable_load(const char* path, rd_qtable** out) {
  if (!path) return fail_null("path");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_qtable{load_qtable(path)}; });
}

rd_status rd_qtable_save(const rd_qtable* table, const char* path) {
  if (!table) return fail_null("table");
  if (!path) return fail_null("path");
  return wrap([&] { save_qtable(table->table, path); });
}

void rd_qtable_free(rd_qtable* table) { delete table; }

/* ---- extraction ---------------------------------------------------------- */

void rd_extract_params_init(rd_extract_params* params) {
  if (!params) return;
  ExtractionConfig defaults;
  params->tau = defaults.tau;
  params->episodes = defaults.episodes;
  params->step_cap = defaults.step_cap;
  params->use_q_values = 1;  // the natural mode for tabular policies
  params->greedy = defaults.greedy ? 1 : 0;
  params->temperature = 1.0;
}

rd_status rd_dataset_from_states(const rd_world* world, const rd_qtable* table,
                                 const rd_extract_params* params, rd_dataset** out) {
  if (!world) return fail_null("world");
  if (!table) return fail_null("table");
  if (!params) return fail_null("params");
  if (!out) return fail_null("out");
  return wrap([&] {
    ExtractionConfig config = to_extraction(*params);
    validate_extraction(config);
    *out = new rd_dataset{
        dataset_from_action_sets(world->world, table->table, config.tau, config.mode)};
  });
}

rd_status rd_dataset_record(const rd_world* world, const rd_qtable* table,
                            const rd_extract_params* params, uint64_t seed, rd_dataset** out) {
  if (!world) return fail_null("world");
  if (!table) return fail_null("table");
  if (!params) return fail_null("params");
  if (!out) return fail_null("out");
  return wrap([&] {
    QTablePolicy policy(world->world, table->table, params->temperature);
    GridSession session(world->world);
    auto trajectories = record_trajectories(policy, session, to_extraction(*params), seed);
    *out = new rd_dataset{build_dataset(trajectories, world->world.schema_ptr(), params->tau)};
  });
}

rd_status rd_record_trajectories(const rd_world* world, const rd_qtable* table,
                                 const rd_extract_params* params, uint64_t seed,
                                 const char* path) {
  if (!world) return fail_null("world");
  if (!table) return fail_null("table");
  if (!params) return fail_null("params");
  if (!path) return fail_null("path");
  return wrap([&] {
    QTablePolicy policy(world->world, table->table, params->temperature);
    GridSession session(world->world);
    auto trajectories = record_trajectories(policy, session, to_extraction(*params), seed);
    save_trajectories(trajectories, world->world.schema(), path);
  });
}

rd_status rd_dataset_from_trajectories(const char* trajectory_path, const char* schema_path,
                                       double tau, rd_dataset** out) {
  if (!trajectory_path) return fail_null("trajectory_path");
  if (!schema_path) return fail_null("schema_path");
  if (!out) return fail_null("out");
  return wrap([&] {
    SchemaPtr schema = load_schema(schema_path);
    auto trajectories = load_trajectories(trajectory_path, schema);
    *out = new rd_dataset{build_dataset(trajectories, schema, tau)};
  });
}

rd_status rd_dataset_load_csv(const char* csv_path, const char* schema_path, rd_dataset** out) {
  if (!csv_path) return fail_null("csv_path");
  if (!schema_path) return fail_null("schema_path");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_dataset{load_dataset_csv(csv_path, load_schema(schema_path))}; });
}

rd_status rd_dataset_save_csv(const rd_dataset* data, const char* csv_path,
                              const char* schema_path) {
  if (!data) return fail_null("data");
  if (!csv_path) return fail_null("csv_path");
  return wrap([&] {
    save_dataset_csv(data->data, csv_path);
    if (schema_path) save_schema(data->data.schema(), schema_path);
  });
}

rd_status rd_dataset_single_label(const rd_dataset* data, uint64_t seed, rd_dataset** out) {
  if (!data) return fail_null("data");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_dataset{sample_single_labels(data->data, seed)}; });
}

rd_status rd_dataset_size(const rd_dataset* data, int64_t* out) {
  if (!data) return fail_null("data");
  if (!out) return fail_null("out");
  *out = static_cast<int64_t>(data->data.size());
  return RD_OK;
}

void rd_dataset_free(rd_dataset* data) { delete data; }

/* ---- rule learning ------------------------------------------------------- */

void rd_learn_params_init(rd_learn_params* params) {
  if (!params) return;
  LearnerConfig defaults;
  params->max_conditions = defaults.max_conditions;
  params->min_covered = defaults.min_covered;
  params->beam_width = defaults.beam_width;
  params->use_wra_set = 1;
  params->min_heuristic = defaults.min_heuristic;
  params->operators = nullptr;
  params->significance_threshold = defaults.significance_threshold;
}

rd_status rd_learn(const rd_dataset* data, const rd_learn_params* params, rd_rulelist** out) {
  if (!data) return fail_null("data");
  if (!params) return fail_null("params");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_rulelist{learn(data->data, to_learner(*params))}; });
}

rd_status rd_rulelist_load(const char* path, rd_rulelist** out) {
  if (!path) return fail_null("path");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_rulelist{load_rulelist(path)}; });
}

rd_status rd_rulelist_save(const rd_rulelist* list, const char* path) {
  if (!list) return fail_null("list");
  if (!path) return fail_null("path");
  return wrap([&] { save_rulelist(list->list, path); });
}

rd_status rd_rulelist_render(const rd_rulelist* list, char** text) {
  if (!list) return fail_null("list");
  if (!text) return fail_null("text");
  return wrap([&] { *text = dup_string(render_rulelist(list->list)); });
}

rd_status rd_rulelist_size(const rd_rulelist* list, int32_t* out) {
  if (!list) return fail_null("list");
  if (!out) return fail_null("out");
  *out = static_cast<int32_t>(list->list.size());
  return RD_OK;
}

rd_status rd_rulelist_predict(const rd_rulelist* list, const char* const* values, size_t n_values,
                              char* label_buf, size_t label_buf_len, int32_t* rule_index) {
  if (!list) return fail_null("list");
  if (!values) return fail_null("values");
  return wrap([&] {
    const FeatureSchema& schema = list->list.schema();
    if (n_values != schema.feature_count())
      raise(ErrorKind::Schema, "expected " + std::to_string(schema.feature_count()) + " values");
    std::vector<Value> instance;
    for (size_t i = 0; i < n_values; ++i)
      instance.push_back(value_from_string(schema, i, values[i]));
    RuleList::Prediction p = list->list.predict(instance);
    if (label_buf && label_buf_len > 0) {
      const std::string& name = schema.label_name(p.label);
      std::size_t n = std::min(label_buf_len - 1, name.size());
      std::memcpy(label_buf, name.c_str(), n);
      label_buf[n] = '\0';
    }
    if (rule_index) *rule_index = static_cast<int32_t>(p.rule_index);
  });
}

void rd_rulelist_free(rd_rulelist* list) { delete list; }

/* ---- refinement ---------------------------------------------------------- */

void rd_refine_params_init(rd_refine_params* params) {
  if (!params) return;
  params->episodes = 500;
  params->step_cap = 1000;
  params->tau = 0.9;
  params->use_q_values = 1;
  params->sample_rollouts = 0;
  params->min_covered = 5;
  params->gate_episodes = 100;
}

rd_status rd_refine(const rd_world* world, const rd_qtable* table, const rd_rulelist* list,
                    const rd_dataset* phase1_data, const rd_learn_params* learn_params,
                    const rd_refine_params* params, uint64_t seed, rd_tree** out, char** notes) {
  if (!world) return fail_null("world");
  if (!table) return fail_null("table");
  if (!list) return fail_null("list");
  if (!learn_params) return fail_null("learn_params");
  if (!params) return fail_null("params");
  if (!out) return fail_null("out");
  return wrap([&] {
    QTablePolicy policy(world->world, table->table);
    ExtractionConfig collect;
    collect.tau = params->tau;
    collect.episodes = params->episodes;
    collect.step_cap = params->step_cap;
    collect.mode = params->use_q_values ? ExtractionMode::QValues : ExtractionMode::Distribution;
    collect.greedy = params->sample_rollouts == 0;

    GridSession session(world->world);
    DisagreementSet disagreements =
        collect_disagreements(policy, session, list->list, collect, seed);

    DataSet data = phase1_data ? phase1_data->data
                               : dataset_from_action_sets(world->world, table->table, params->tau,
                                                          collect.mode);

    RefineOptions options;
    options.min_covered = params->min_covered;
    GridSession gate_session(world->world);
    if (params->gate_episodes > 0) {
      options.gate_env = &gate_session;
      options.gate_episodes = params->gate_episodes;
      options.gate_step_cap = params->step_cap;
    }
    RefineResult result =
        refine(list->list, disagreements, data, to_learner(*learn_params), options, seed);
    if (notes) {
      std::ostringstream text;
      for (const auto& note : result.notes)
        text << "rule " << (note.rule_index + 1) << ": bucket " << note.bucket_size << ", "
             << note.detail << '\n';
      *notes = dup_string(text.str());
    }
    *out = new rd_tree{std::move(result.tree)};
  });
}

rd_status rd_tree_load(const char* path, rd_tree** out) {
  if (!path) return fail_null("path");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_tree{load_tree(path)}; });
}

rd_status rd_tree_save(const rd_tree* tree, const char* path) {
  if (!tree) return fail_null("tree");
  if (!path) return fail_null("path");
  return wrap([&] { save_tree(tree->tree, path); });
}

rd_status rd_tree_render(const rd_tree* tree, char** text) {
  if (!tree) return fail_null("tree");
  if (!text) return fail_null("text");
  return wrap([&] { *text = dup_string(render_tree(tree->tree)); });
}

rd_status rd_tree_flatten(const rd_tree* tree, rd_rulelist** out) {
  if (!tree) return fail_null("tree");
  if (!out) return fail_null("out");
  return wrap([&] { *out = new rd_rulelist{flatten(tree->tree)}; });
}

void rd_tree_free(rd_tree* tree) { delete tree; }

/* ---- evaluation ----------------------------------------------------------- */

rd_status rd_eval_create(const rd_world* world, int64_t episodes, int64_t step_cap, uint64_t seed,
                         rd_eval** out) {
  if (!world) return fail_null("world");
  if (!out) return fail_null("out");
  return wrap([&] {
    if (episodes < 1) raise(ErrorKind::Config, "evaluate: episodes must be positive");
    if (step_cap < 1) raise(ErrorKind::Config, "evaluate: step_cap must be positive");
    *out = new rd_eval{world, episodes, step_cap, seed, {}, {}, {}};
  });
}

rd_status rd_eval_add_qtable(rd_eval* eval, const char* name, const rd_qtable* table) {
  if (!eval) return fail_null("eval");
  if (!name) return fail_null("name");
  if (!table) return fail_null("table");
  eval->qtables.emplace_back(name, table);
  eval->order.emplace_back(eval->qtables.size() - 1, 0);
  return RD_OK;
}

rd_status rd_eval_add_rulelist(rd_eval* eval, const char* name, const rd_rulelist* list) {
  if (!eval) return fail_null("eval");
  if (!name) return fail_null("name");
  if (!list) return fail_null("list");
  eval->rulelists.emplace_back(name, list);
  eval->order.emplace_back(eval->rulelists.size() - 1, 1);
  return RD_OK;
}

rd_status rd_eval_run(rd_eval* eval, rd_report** out) {
  if (!eval) return fail_null("eval");
  if (!out) return fail_null("out");
  return wrap([&] {
    if (eval->order.empty()) raise(ErrorKind::Config, "evaluate: no agents added");
    std::vector<QTablePolicy> policies;
    policies.reserve(eval->qtables.size());
    for (const auto& entry : eval->qtables)
      policies.emplace_back(eval->world->world, entry.second->table);
    std::vector<GreedyPolicyAgent> policy_agents;
    policy_agents.reserve(policies.size());
    for (const auto& policy : policies) policy_agents.emplace_back(policy);
    std::vector<RuleListAgent> rule_agents;
    rule_agents.reserve(eval->rulelists.size());
    for (const auto& entry : eval->rulelists) rule_agents.emplace_back(entry.second->list);

    std::vector<std::pair<std::string, const Agent*>> agents;
    for (const auto& [index, kind] : eval->order) {
      if (kind == 0)
        agents.emplace_back(eval->qtables[index].first, &policy_agents[index]);
      else
        agents.emplace_back(eval->rulelists[index].first, &rule_agents[index]);
    }
    GridSession session(eval->world->world);
    EvaluationReport report =
        evaluate(agents, session, eval->episodes, eval->step_cap, eval->seed);
    report.environment_json = grid_config_to_json(eval->world->world.config());
    *out = new rd_report{std::move(report)};
  });
}

void rd_eval_free(rd_eval* eval) { delete eval; }

rd_status rd_report_render(const rd_report* report, char** text) {
  if (!report) return fail_null("report");
  if (!text) return fail_null("text");
  return wrap([&] { *text = dup_string(report_to_text(report->report)); });
}

rd_status rd_report_save(const rd_report* report, const char* json_path) {
  if (!report) return fail_null("report");
  if (!json_path) return fail_null("json_path");
  return wrap([&] { save_report(report->report, json_path); });
}

rd_status rd_report_save_csv(const rd_report* report, const char* csv_path) {
  if (!report) return fail_null("report");
  if (!csv_path) return fail_null("csv_path");
  return wrap([&] { write_text_file(csv_path, report_to_csv(report->report)); });
}

rd_status rd_report_agent_count(const rd_report* report, int32_t* out) {
  if (!report) return fail_null("report");
  if (!out) return fail_null("out");
  *out = static_cast<int32_t>(report->report.agents.size());
  return RD_OK;
}

rd_status rd_report_mean(const rd_report* report, int32_t agent, double* out) {
  if (!report) return fail_null("report");
  if (!out) return fail_null("out");
  if (agent < 0 || static_cast<std::size_t>(agent) >= report->report.agents.size()) {
    g_last_error = "agent index out of range";
    return RD_E_INVALID_ARGUMENT;
  }
  *out = report->report.agents[agent].summary.mean;
  return RD_OK;
}

void rd_report_free(rd_report* report) { delete report; }

}  // extern "C"
