// ruledist command line: train / distill / refine / evaluate, wired to the
// shared-library C API. Exit codes: 0 success, 2 usage or config errors,
// 1 runtime failures.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ruledist.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(rd_status status) {
  int code = (status == RD_E_CONFIG || status == RD_E_INVALID_ARGUMENT) ? kExitUsage : kExitRuntime;
  throw CliError{code, std::string(rd_status_name(status)) + ": " + rd_last_error()};
}

void check(rd_status status) {
  if (status != RD_OK) fail(status);
}

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path))
    throw CliError{kExitUsage, what + " '" + path + "' does not exist"};
}

// Handle wrappers so error paths cannot leak.
using WorldPtr = std::unique_ptr<rd_world, decltype(&rd_world_free)>;
using QTablePtr = std::unique_ptr<rd_qtable, decltype(&rd_qtable_free)>;
using DatasetPtr = std::unique_ptr<rd_dataset, decltype(&rd_dataset_free)>;
using RuleListPtr = std::unique_ptr<rd_rulelist, decltype(&rd_rulelist_free)>;
using TreePtr = std::unique_ptr<rd_tree, decltype(&rd_tree_free)>;
using ReportPtr = std::unique_ptr<rd_report, decltype(&rd_report_free)>;

WorldPtr load_world(const std::string& env_path) {
  rd_world* world = nullptr;
  if (env_path.empty()) {
    check(rd_world_create_muddy(&world));
  } else {
    require_file(env_path, "environment config");
    check(rd_world_load(env_path.c_str(), &world));
  }
  return WorldPtr(world, rd_world_free);
}

QTablePtr load_qtable_file(const std::string& path) {
  require_file(path, "q-table");
  rd_qtable* table = nullptr;
  check(rd_qtable_load(path.c_str(), &table));
  return QTablePtr(table, rd_qtable_free);
}

std::string render_rules(const rd_rulelist* list) {
  char* text = nullptr;
  check(rd_rulelist_render(list, &text));
  std::string out(text);
  rd_string_free(text);
  return out;
}

void write_file_or_fail(const std::string& path, const std::string& content) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw CliError{kExitRuntime, "cannot write '" + path + "'"};
  std::fwrite(content.data(), 1, content.size(), f);
  std::fclose(f);
}

// Shared learner flag bundle.
struct LearnFlags {
  rd_learn_params params{};
  std::string heuristic = "wra-set";
  std::string operators;

  void attach(CLI::App* cmd) {
    rd_learn_params_init(&params);
    cmd->add_option("--max-conditions", params.max_conditions, "Maximum conditions per rule")
        ->capture_default_str();
    cmd->add_option("--min-covered", params.min_covered, "Minimum instances a rule must cover")
        ->capture_default_str();
    cmd->add_option("--beam-width", params.beam_width, "Beam width of the rule search")
        ->capture_default_str();
    cmd->add_option("--heuristic", heuristic, "Rule quality heuristic")
        ->check(CLI::IsMember({"wra", "wra-set"}))
        ->capture_default_str();
    cmd->add_option("--min-heuristic", params.min_heuristic,
                    "Accept rules scoring strictly above this")
        ->capture_default_str();
    cmd->add_option("--operators", operators,
                    "Comma-separated operator subset (default ==,!=,<=,>=)");
    cmd->add_option("--significance", params.significance_threshold,
                    "Likelihood-ratio significance cutoff (0 disables)")
        ->capture_default_str();
  }

  const rd_learn_params* get() {
    params.use_wra_set = heuristic == "wra-set" ? 1 : 0;
    params.operators = operators.empty() ? nullptr : operators.c_str();
    return &params;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Distill tabular RL policies into ordered rule lists"};
  app.require_subcommand(1);

  // --- train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Q-learning on the grid environment");
  std::string train_env, train_out;
  std::uint64_t train_seed = 0;
  rd_train_params train_params;
  rd_train_params_init(&train_params);
  bool no_exploring = false;
  train->add_option("--env", train_env, "Environment config JSON (default: built-in muddy grid)");
  train->add_option("--alpha", train_params.alpha, "Learning rate")->capture_default_str();
  train->add_option("--gamma", train_params.gamma, "Discount factor")->capture_default_str();
  train->add_option("--epsilon", train_params.epsilon, "Exploration rate")->capture_default_str();
  train->add_option("--episodes", train_params.episodes, "Training episodes")->capture_default_str();
  train->add_option("--step-cap", train_params.step_cap, "Per-episode step limit")
      ->capture_default_str();
  train->add_flag("--no-exploring-starts", no_exploring,
                  "Start training episodes on clean cells only");
  train->add_option("--seed", train_seed, "Random seed")->required();
  train->add_option("--out", train_out, "Output Q-table path")->required();

  // --- distill ---------------------------------------------------------------
  auto* distill = app.add_subcommand("distill", "Mine a rule list from a policy");
  std::string di_env, di_qtable, di_traj, di_schema, di_out, di_source = "states";
  std::string di_dataset_out, di_record_out, di_mode = "q-values";
  std::uint64_t di_seed = 0;
  bool di_single_label = false, di_greedy = false;
  rd_extract_params di_extract;
  rd_extract_params_init(&di_extract);
  LearnFlags di_learn;
  distill->add_option("--env", di_env, "Environment config JSON (default: built-in muddy grid)");
  distill->add_option("--qtable", di_qtable, "Q-table to distill");
  distill->add_option("--trajectories", di_traj, "Recorded trajectory file to distill");
  distill->add_option("--schema", di_schema, "Schema JSON for --trajectories");
  distill->add_option("--tau", di_extract.tau, "Near-optimality threshold")->capture_default_str();
  distill
      ->add_option("--source", di_source,
                   "Dataset source for --qtable: every state once, or recorded rollouts")
      ->check(CLI::IsMember({"states", "record"}))
      ->capture_default_str();
  distill->add_option("--episodes", di_extract.episodes, "Episodes when recording")
      ->capture_default_str();
  distill->add_option("--step-cap", di_extract.step_cap, "Per-episode step limit")
      ->capture_default_str();
  distill
      ->add_option("--mode", di_mode, "Vector fed through the threshold: q-values or distribution")
      ->check(CLI::IsMember({"q-values", "distribution"}))
      ->capture_default_str();
  distill->add_flag("--greedy", di_greedy, "Record greedy rollouts instead of sampling");
  distill->add_option("--temperature", di_extract.temperature, "Softmax temperature")
      ->capture_default_str();
  distill->add_flag("--single-label", di_single_label,
                    "Ablation: sample one label per instance before learning");
  di_learn.attach(distill);
  distill->add_option("--seed", di_seed, "Random seed")->required();
  distill->add_option("--out", di_out, "Output prefix (<prefix>.rules.json/.txt)")->required();
  distill->add_option("--dataset-out", di_dataset_out,
                      "Also write the training set (<path> CSV + <path>.schema.json)");
  distill->add_option("--record-out", di_record_out, "Also write recorded trajectories (TSV)");

  // --- refine ----------------------------------------------------------------
  auto* refine = app.add_subcommand("refine", "Expand rules where rollouts disagree");
  std::string re_env, re_qtable, re_rules, re_dataset, re_schema, re_out;
  std::uint64_t re_seed = 0;
  bool re_sample = false;
  rd_refine_params re_params;
  rd_refine_params_init(&re_params);
  LearnFlags re_learn;
  refine->add_option("--env", re_env, "Environment config JSON (default: built-in muddy grid)");
  refine->add_option("--rules", re_rules, "Phase-1 rule list (structured JSON)")->required();
  refine->add_option("--qtable", re_qtable, "Q-table of the source policy")->required();
  refine->add_option("--tau", re_params.tau, "Near-optimality threshold")->capture_default_str();
  refine->add_option("--episodes", re_params.episodes, "Policy rollouts to collect disagreements")
      ->capture_default_str();
  refine->add_option("--step-cap", re_params.step_cap, "Per-episode step limit")
      ->capture_default_str();
  refine->add_flag("--sample", re_sample, "Sample the policy instead of acting greedily");
  refine
      ->add_option("--refine-min-covered", re_params.min_covered,
                   "Bucket size and coverage floor for refinement mining")
      ->capture_default_str();
  refine
      ->add_option("--gate-episodes", re_params.gate_episodes,
                   "Rollouts backing the keep-only-if-better gate (0 disables)")
      ->capture_default_str();
  refine->add_option("--dataset", re_dataset, "Phase-1 dataset CSV for balancing (optional)");
  refine->add_option("--schema", re_schema, "Schema JSON for --dataset");
  re_learn.attach(refine);
  refine->add_option("--seed", re_seed, "Random seed")->required();
  refine->add_option("--out", re_out, "Output prefix (<prefix>.tree.json/.txt)")->required();

  // --- evaluate ----------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "Paired greedy rollouts for agents");
  std::string ev_env, ev_out, ev_csv;
  std::uint64_t ev_seed = 0;
  std::int64_t ev_episodes = 50, ev_step_cap = 1000;
  std::vector<std::string> ev_qtables, ev_rules, ev_trees;
  evaluate->add_option("--env", ev_env, "Environment config JSON (default: built-in muddy grid)");
  evaluate->add_option("--episodes", ev_episodes, "Evaluation episodes")->capture_default_str();
  evaluate->add_option("--step-cap", ev_step_cap, "Per-episode step limit")->capture_default_str();
  evaluate->add_option("--qtable", ev_qtables, "Q-table agent as NAME=PATH (repeatable)");
  evaluate->add_option("--rules", ev_rules, "Rule-list agent as NAME=PATH (repeatable)");
  evaluate->add_option("--tree", ev_trees, "Flattened refinement tree as NAME=PATH (repeatable)");
  evaluate->add_option("--seed", ev_seed, "Random seed")->required();
  evaluate->add_option("--out", ev_out, "Output prefix (<prefix>.report.json/.txt)")->required();
  evaluate->add_option("--csv-out", ev_csv, "Also write per-episode returns as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) {
      WorldPtr world = load_world(train_env);
      train_params.exploring_starts = no_exploring ? 0 : 1;
      rd_qtable* raw = nullptr;
      check(rd_qtable_train(world.get(), &train_params, train_seed, &raw));
      QTablePtr table(raw, rd_qtable_free);
      check(rd_qtable_save(table.get(), train_out.c_str()));

      rd_eval* ev = nullptr;
      check(rd_eval_create(world.get(), 50, 1000, train_seed, &ev));
      std::unique_ptr<rd_eval, decltype(&rd_eval_free)> eval(ev, rd_eval_free);
      check(rd_eval_add_qtable(eval.get(), "greedy", table.get()));
      rd_report* rep = nullptr;
      check(rd_eval_run(eval.get(), &rep));
      ReportPtr report(rep, rd_report_free);
      double mean = 0;
      check(rd_report_mean(report.get(), 0, &mean));
      std::printf("trained %lld episodes; greedy mean return over 50 seeded episodes: %.2f\n",
                  static_cast<long long>(train_params.episodes), mean);
      std::printf("q-table written to %s\n", train_out.c_str());
    }

    if (*distill) {
      if (di_qtable.empty() == di_traj.empty())
        throw CliError{kExitUsage, "pass exactly one of --qtable or --trajectories"};
      di_extract.use_q_values = di_mode == "q-values" ? 1 : 0;
      di_extract.greedy = di_greedy ? 1 : 0;

      WorldPtr world = load_world(di_env);
      DatasetPtr dataset(nullptr, rd_dataset_free);
      if (!di_qtable.empty()) {
        QTablePtr table = load_qtable_file(di_qtable);
        if (!di_record_out.empty())
          check(rd_record_trajectories(world.get(), table.get(), &di_extract, di_seed,
                                       di_record_out.c_str()));
        rd_dataset* raw = nullptr;
        if (di_source == "states")
          check(rd_dataset_from_states(world.get(), table.get(), &di_extract, &raw));
        else
          check(rd_dataset_record(world.get(), table.get(), &di_extract, di_seed, &raw));
        dataset.reset(raw);
      } else {
        if (di_schema.empty())
          throw CliError{kExitUsage, "--trajectories requires --schema"};
        require_file(di_traj, "trajectory file");
        require_file(di_schema, "schema");
        rd_dataset* raw = nullptr;
        check(rd_dataset_from_trajectories(di_traj.c_str(), di_schema.c_str(), di_extract.tau,
                                           &raw));
        dataset.reset(raw);
      }

      if (di_single_label) {
        rd_dataset* raw = nullptr;
        check(rd_dataset_single_label(dataset.get(), di_seed, &raw));
        dataset.reset(raw);
      }
      if (!di_dataset_out.empty())
        check(rd_dataset_save_csv(dataset.get(), di_dataset_out.c_str(),
                                  (di_dataset_out + ".schema.json").c_str()));

      rd_rulelist* raw_rules = nullptr;
      check(rd_learn(dataset.get(), di_learn.get(), &raw_rules));
      RuleListPtr rules(raw_rules, rd_rulelist_free);
      check(rd_rulelist_save(rules.get(), (di_out + ".rules.json").c_str()));
      std::string text = render_rules(rules.get());
      write_file_or_fail(di_out + ".rules.txt", text);

      std::int64_t n = 0;
      check(rd_dataset_size(dataset.get(), &n));
      std::printf("%lld instances -> rule list:\n%s", static_cast<long long>(n), text.c_str());
      std::printf("written to %s.rules.{json,txt}\n", di_out.c_str());
    }

    if (*refine) {
      WorldPtr world = load_world(re_env);
      QTablePtr table = load_qtable_file(re_qtable);
      require_file(re_rules, "rule list");
      rd_rulelist* raw_rules = nullptr;
      check(rd_rulelist_load(re_rules.c_str(), &raw_rules));
      RuleListPtr rules(raw_rules, rd_rulelist_free);

      DatasetPtr dataset(nullptr, rd_dataset_free);
      if (!re_dataset.empty()) {
        if (re_schema.empty()) throw CliError{kExitUsage, "--dataset requires --schema"};
        require_file(re_dataset, "dataset");
        require_file(re_schema, "schema");
        rd_dataset* raw = nullptr;
        check(rd_dataset_load_csv(re_dataset.c_str(), re_schema.c_str(), &raw));
        dataset.reset(raw);
      }
      re_params.sample_rollouts = re_sample ? 1 : 0;

      rd_tree* raw_tree = nullptr;
      char* notes = nullptr;
      check(rd_refine(world.get(), table.get(), rules.get(), dataset.get(), re_learn.get(),
                      &re_params, re_seed, &raw_tree, &notes));
      TreePtr tree(raw_tree, rd_tree_free);
      if (notes) {
        std::printf("%s", notes);
        rd_string_free(notes);
      }
      check(rd_tree_save(tree.get(), (re_out + ".tree.json").c_str()));
      char* text = nullptr;
      check(rd_tree_render(tree.get(), &text));
      write_file_or_fail(re_out + ".tree.txt", text);
      std::printf("%s", text);
      rd_string_free(text);

      // the flattened list is a rule list in its own right; feeding it back
      // into `refine --rules` runs another round with children as leaves
      rd_rulelist* raw_flat = nullptr;
      check(rd_tree_flatten(tree.get(), &raw_flat));
      RuleListPtr flat(raw_flat, rd_rulelist_free);
      check(rd_rulelist_save(flat.get(), (re_out + ".flat.rules.json").c_str()));
      std::printf("written to %s.tree.{json,txt} and %s.flat.rules.json\n", re_out.c_str(),
                  re_out.c_str());
    }

    if (*evaluate) {
      WorldPtr world = load_world(ev_env);
      rd_eval* raw_eval = nullptr;
      check(rd_eval_create(world.get(), ev_episodes, ev_step_cap, ev_seed, &raw_eval));
      std::unique_ptr<rd_eval, decltype(&rd_eval_free)> eval(raw_eval, rd_eval_free);

      auto split_spec = [](const std::string& spec) -> std::pair<std::string, std::string> {
        auto pos = spec.find('=');
        if (pos == std::string::npos || pos == 0 || pos + 1 == spec.size())
          throw CliError{kExitUsage, "agent spec '" + spec + "' must be NAME=PATH"};
        return {spec.substr(0, pos), spec.substr(pos + 1)};
      };

      std::vector<QTablePtr> tables;
      std::vector<RuleListPtr> lists;
      for (const auto& spec : ev_qtables) {
        auto [name, path] = split_spec(spec);
        tables.push_back(load_qtable_file(path));
        check(rd_eval_add_qtable(eval.get(), name.c_str(), tables.back().get()));
      }
      for (const auto& spec : ev_rules) {
        auto [name, path] = split_spec(spec);
        require_file(path, "rule list");
        rd_rulelist* raw = nullptr;
        check(rd_rulelist_load(path.c_str(), &raw));
        lists.emplace_back(raw, rd_rulelist_free);
        check(rd_eval_add_rulelist(eval.get(), name.c_str(), lists.back().get()));
      }
      for (const auto& spec : ev_trees) {
        auto [name, path] = split_spec(spec);
        require_file(path, "refinement tree");
        rd_tree* raw_tree = nullptr;
        check(rd_tree_load(path.c_str(), &raw_tree));
        TreePtr tree(raw_tree, rd_tree_free);
        rd_rulelist* raw = nullptr;
        check(rd_tree_flatten(tree.get(), &raw));
        lists.emplace_back(raw, rd_rulelist_free);
        check(rd_eval_add_rulelist(eval.get(), name.c_str(), lists.back().get()));
      }

      rd_report* raw_report = nullptr;
      check(rd_eval_run(eval.get(), &raw_report));
      ReportPtr report(raw_report, rd_report_free);
      check(rd_report_save(report.get(), (ev_out + ".report.json").c_str()));
      char* text = nullptr;
      check(rd_report_render(report.get(), &text));
      write_file_or_fail(ev_out + ".report.txt", text);
      std::printf("%s", text);
      rd_string_free(text);
      if (!ev_csv.empty()) check(rd_report_save_csv(report.get(), ev_csv.c_str()));
      std::printf("written to %s.report.{json,txt}\n", ev_out.c_str());
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
