/*
 * ruledist — C interface to the rule-distillation toolkit.
 *
 * The library converts a tabular reinforcement-learning policy into an
 * ordered rule list via set-valued rule induction, refines the list against
 * rollouts in the environment, and evaluates agents. All functions return
 * rd_status; on failure rd_last_error() describes the problem (the message
 * is thread-local and valid until the next failing call on that thread).
 *
 * Objects are opaque handles created by rd_*_create/load/train functions and
 * released with the matching rd_*_free. Handles passed as inputs must stay
 * alive for the duration of the call (rd_eval keeps borrowed agent handles
 * until rd_eval_run returns, so free them only afterwards).
 *
 * Strings returned through char** are heap-allocated; release them with
 * rd_string_free.
 */

#ifndef RULEDIST_H
#define RULEDIST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rd_status {
  RD_OK = 0,
  RD_E_INVALID_ARGUMENT = 1,
  RD_E_CONFIG = 2,
  RD_E_SCHEMA = 3,
  RD_E_PARSE = 4,
  RD_E_IO = 5,
  RD_E_EMPTY_DATASET = 6,
  RD_E_STATE = 7,
  RD_E_UNKNOWN = 8,
} rd_status;

const char* rd_last_error(void);
const char* rd_status_name(rd_status status);
void rd_string_free(char* text);

typedef struct rd_world rd_world;
typedef struct rd_qtable rd_qtable;
typedef struct rd_dataset rd_dataset;
typedef struct rd_rulelist rd_rulelist;
typedef struct rd_tree rd_tree;
typedef struct rd_eval rd_eval;
typedef struct rd_report rd_report;

/* ---- environment --------------------------------------------------------
 * The grid world: X rightward, Y upward, goal at the top-right corner,
 * -1 per step and -10 for entering a muddy cell. The "muddy" default is a
 * 20x20 grid with a plus-shaped mud patch near the middle; configs load and
 * save as JSON ({"width", "height", "step_reward", "mud_reward", "mud"}).
 */
rd_status rd_world_create_muddy(rd_world** out);
rd_status rd_world_create_open(rd_world** out);
rd_status rd_world_load(const char* path, rd_world** out);
rd_status rd_world_save(const rd_world* world, const char* path);
/* Writes the feature/label schema (features X, Y; labels UP/DOWN/LEFT/RIGHT)
 * used by datasets and trajectory files for this environment. */
rd_status rd_world_save_schema(const rd_world* world, const char* path);
void rd_world_free(rd_world* world);

/* ---- Q-learning ---------------------------------------------------------- */

typedef struct rd_train_params {
  double alpha;
  double gamma;
  double epsilon;
  int64_t episodes;
  int64_t step_cap;
  int exploring_starts; /* nonzero: training episodes may start on mud */
} rd_train_params;

void rd_train_params_init(rd_train_params* params);

rd_status rd_qtable_train(const rd_world* world, const rd_train_params* params, uint64_t seed,
                          rd_qtable** out);
rd_status rd_qtable_load(const char* path, rd_qtable** out);
rd_status rd_qtable_save(const rd_qtable* table, const char* path);
void rd_qtable_free(rd_qtable* table);

/* ---- extraction ----------------------------------------------------------
 * tau in (0, 1] is the proportional threshold deciding which actions count
 * as near-optimal. use_q_values selects raw action values (shifted by their
 * per-state minimum when negative) instead of softmax probabilities.
 */

typedef struct rd_extract_params {
  double tau;
  int64_t episodes;
  int64_t step_cap;
  int use_q_values;
  int greedy; /* nonzero: act on the argmax instead of sampling */
  double temperature;
} rd_extract_params;

void rd_extract_params_init(rd_extract_params* params);

/* One instance per non-terminal state, labelled with its near-optimal action
 * set. The exact extraction for tabular policies. */
rd_status rd_dataset_from_states(const rd_world* world, const rd_qtable* table,
                                 const rd_extract_params* params, rd_dataset** out);
/* Roll out episodes and build the dataset from the recorded steps. */
rd_status rd_dataset_record(const rd_world* world, const rd_qtable* table,
                            const rd_extract_params* params, uint64_t seed, rd_dataset** out);
/* Roll out episodes and persist them as a tab-separated trajectory file. */
rd_status rd_record_trajectories(const rd_world* world, const rd_qtable* table,
                                 const rd_extract_params* params, uint64_t seed,
                                 const char* path);
/* Build a dataset from a trajectory file recorded here or by a third party. */
rd_status rd_dataset_from_trajectories(const char* trajectory_path, const char* schema_path,
                                       double tau, rd_dataset** out);
rd_status rd_dataset_load_csv(const char* csv_path, const char* schema_path, rd_dataset** out);
rd_status rd_dataset_save_csv(const rd_dataset* data, const char* csv_path,
                              const char* schema_path);
/* Ablation: collapse each label set to one uniformly drawn label. */
rd_status rd_dataset_single_label(const rd_dataset* data, uint64_t seed, rd_dataset** out);
rd_status rd_dataset_size(const rd_dataset* data, int64_t* out);
void rd_dataset_free(rd_dataset* data);

/* ---- rule learning ------------------------------------------------------- */

typedef struct rd_learn_params {
  int32_t max_conditions;
  int32_t min_covered;
  int32_t beam_width;
  int use_wra_set;        /* nonzero: set-valued heuristic; zero: classical WRA */
  double min_heuristic;   /* accept rules scoring strictly above this */
  const char* operators;  /* comma-separated subset of ==,!=,<=,>=; NULL = all */
  double significance_threshold; /* likelihood-ratio cutoff; 0 disables */
} rd_learn_params;

void rd_learn_params_init(rd_learn_params* params);

rd_status rd_learn(const rd_dataset* data, const rd_learn_params* params, rd_rulelist** out);

rd_status rd_rulelist_load(const char* path, rd_rulelist** out);
rd_status rd_rulelist_save(const rd_rulelist* list, const char* path); /* structured JSON */
rd_status rd_rulelist_render(const rd_rulelist* list, char** text);    /* numbered text */
rd_status rd_rulelist_size(const rd_rulelist* list, int32_t* out);
/* Predict for one instance given as textual feature values (one string per
 * schema feature). Writes the label into label_buf and the index of the rule
 * that fired into rule_index (either may be NULL). */
rd_status rd_rulelist_predict(const rd_rulelist* list, const char* const* values, size_t n_values,
                              char* label_buf, size_t label_buf_len, int32_t* rule_index);
void rd_rulelist_free(rd_rulelist* list);

/* ---- refinement -----------------------------------------------------------
 * Rolls the Q-table policy out, buckets the states where the rule list
 * leaves the policy's near-optimal set, mines refinements per rule (the
 * original rule stays as each bucket's last child), and keeps a refinement
 * only when it strictly improves mean rollout return over the gate batch.
 */

typedef struct rd_refine_params {
  int64_t episodes;  /* policy rollouts used to collect disagreements */
  int64_t step_cap;
  double tau;
  int use_q_values;
  int sample_rollouts;    /* nonzero: sample the policy instead of acting greedily */
  int32_t min_covered;    /* bucket + mining coverage floor */
  int64_t gate_episodes;  /* 0 disables the performance gate */
} rd_refine_params;

void rd_refine_params_init(rd_refine_params* params);

/* phase1_data may be NULL: the exhaustive per-state dataset is then rebuilt
 * from the Q-table for balancing. notes (optional) receives a human-readable
 * per-rule summary. */
rd_status rd_refine(const rd_world* world, const rd_qtable* table, const rd_rulelist* list,
                    const rd_dataset* phase1_data, const rd_learn_params* learn_params,
                    const rd_refine_params* params, uint64_t seed, rd_tree** out, char** notes);

rd_status rd_tree_load(const char* path, rd_tree** out);
rd_status rd_tree_save(const rd_tree* tree, const char* path); /* structured JSON */
rd_status rd_tree_render(const rd_tree* tree, char** text);    /* 1 / 1.1 / ... numbering */
rd_status rd_tree_flatten(const rd_tree* tree, rd_rulelist** out);
void rd_tree_free(rd_tree* tree);

/* ---- evaluation -----------------------------------------------------------
 * Greedy rollouts with paired starts: episode i replays the same random
 * stream for every agent.
 */

rd_status rd_eval_create(const rd_world* world, int64_t episodes, int64_t step_cap, uint64_t seed,
                         rd_eval** out);
rd_status rd_eval_add_qtable(rd_eval* eval, const char* name, const rd_qtable* table);
rd_status rd_eval_add_rulelist(rd_eval* eval, const char* name, const rd_rulelist* list);
rd_status rd_eval_run(rd_eval* eval, rd_report** out);
void rd_eval_free(rd_eval* eval);

rd_status rd_report_render(const rd_report* report, char** text);
rd_status rd_report_save(const rd_report* report, const char* json_path);
rd_status rd_report_save_csv(const rd_report* report, const char* csv_path);
rd_status rd_report_agent_count(const rd_report* report, int32_t* out);
rd_status rd_report_mean(const rd_report* report, int32_t agent, double* out);
void rd_report_free(rd_report* report);

#ifdef __cplusplus
}
#endif

#endif /* RULEDIST_H */
