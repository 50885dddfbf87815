#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "ruledist.h"

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  std::fclose(f);
  return out;
}

}  // namespace

TEST_CASE("null arguments are rejected with a message") {
  CHECK(rd_world_create_muddy(nullptr) == RD_E_INVALID_ARGUMENT);
  CHECK(std::string(rd_last_error()).find("NULL") != std::string::npos);
  CHECK(rd_qtable_load(nullptr, nullptr) == RD_E_INVALID_ARGUMENT);
  CHECK(std::string(rd_status_name(RD_E_CONFIG)) == "config");
}

TEST_CASE("config errors carry the config status") {
  rd_world* world = nullptr;
  REQUIRE(rd_world_create_open(&world) == RD_OK);
  rd_train_params params;
  rd_train_params_init(&params);
  params.gamma = 1.2;
  rd_qtable* table = nullptr;
  CHECK(rd_qtable_train(world, &params, 1, &table) == RD_E_CONFIG);
  CHECK(std::string(rd_last_error()).find("gamma") != std::string::npos);
  rd_world_free(world);
}

TEST_CASE("io and parse failures map to their statuses") {
  rd_qtable* table = nullptr;
  CHECK(rd_qtable_load("/nonexistent/q.tsv", &table) == RD_E_IO);
  rd_world* world = nullptr;
  std::string path = temp_path("rd_capi_bad.json");
  FILE* f = std::fopen(path.c_str(), "wb");
  std::fputs("not json", f);
  std::fclose(f);
  CHECK(rd_world_load(path.c_str(), &world) == RD_E_PARSE);
  std::remove(path.c_str());
}

TEST_CASE("end to end through the shared library") {
  rd_world* world = nullptr;
  REQUIRE(rd_world_create_muddy(&world) == RD_OK);

  rd_train_params train;
  rd_train_params_init(&train);
  rd_qtable* table = nullptr;
  REQUIRE(rd_qtable_train(world, &train, 7, &table) == RD_OK);

  std::string qpath = temp_path("rd_capi_q.tsv");
  REQUIRE(rd_qtable_save(table, qpath.c_str()) == RD_OK);
  rd_qtable* reloaded = nullptr;
  REQUIRE(rd_qtable_load(qpath.c_str(), &reloaded) == RD_OK);

  // distill from the exhaustive state dataset
  rd_extract_params extract;
  rd_extract_params_init(&extract);
  rd_dataset* dataset = nullptr;
  REQUIRE(rd_dataset_from_states(world, reloaded, &extract, &dataset) == RD_OK);
  int64_t size = 0;
  REQUIRE(rd_dataset_size(dataset, &size) == RD_OK);
  CHECK(size == 399);

  rd_learn_params learn;
  rd_learn_params_init(&learn);
  rd_rulelist* rules = nullptr;
  REQUIRE(rd_learn(dataset, &learn, &rules) == RD_OK);
  int32_t n_rules = 0;
  REQUIRE(rd_rulelist_size(rules, &n_rules) == RD_OK);
  CHECK(n_rules == 2);

  char* text = nullptr;
  REQUIRE(rd_rulelist_render(rules, &text) == RD_OK);
  CHECK(std::string(text).find("IF X<=18 THEN Class=RIGHT") != std::string::npos);
  rd_string_free(text);

  // predict through the C surface
  const char* values[2] = {"19", "4"};
  char label[16];
  int32_t fired = -1;
  REQUIRE(rd_rulelist_predict(rules, values, 2, label, sizeof label, &fired) == RD_OK);
  CHECK(std::string(label) == "UP");
  CHECK(fired == 1);

  // rule list save/load round trip
  std::string rpath = temp_path("rd_capi_rules.json");
  REQUIRE(rd_rulelist_save(rules, rpath.c_str()) == RD_OK);
  rd_rulelist* rules2 = nullptr;
  REQUIRE(rd_rulelist_load(rpath.c_str(), &rules2) == RD_OK);

  // refine and flatten
  rd_refine_params refine;
  rd_refine_params_init(&refine);
  refine.episodes = 300;
  rd_tree* tree = nullptr;
  char* notes = nullptr;
  REQUIRE(rd_refine(world, reloaded, rules2, dataset, &learn, &refine, 11, &tree, &notes) == RD_OK);
  CHECK(notes != nullptr);
  rd_string_free(notes);

  std::string tpath = temp_path("rd_capi_tree.json");
  REQUIRE(rd_tree_save(tree, tpath.c_str()) == RD_OK);
  rd_tree* tree2 = nullptr;
  REQUIRE(rd_tree_load(tpath.c_str(), &tree2) == RD_OK);
  rd_rulelist* flat = nullptr;
  REQUIRE(rd_tree_flatten(tree2, &flat) == RD_OK);

  // evaluate policy vs phase-1 vs refined
  rd_eval* eval = nullptr;
  REQUIRE(rd_eval_create(world, 50, 1000, 900, &eval) == RD_OK);
  REQUIRE(rd_eval_add_qtable(eval, "policy", reloaded) == RD_OK);
  REQUIRE(rd_eval_add_rulelist(eval, "phase1", rules2) == RD_OK);
  REQUIRE(rd_eval_add_rulelist(eval, "refined", flat) == RD_OK);
  rd_report* report = nullptr;
  REQUIRE(rd_eval_run(eval, &report) == RD_OK);

  int32_t agents = 0;
  REQUIRE(rd_report_agent_count(report, &agents) == RD_OK);
  CHECK(agents == 3);
  double policy_mean = 0, refined_mean = 0;
  REQUIRE(rd_report_mean(report, 0, &policy_mean) == RD_OK);
  REQUIRE(rd_report_mean(report, 2, &refined_mean) == RD_OK);
  CHECK(policy_mean < 0);
  CHECK(refined_mean >= 1.05 * policy_mean);
  CHECK(rd_report_mean(report, 5, &refined_mean) == RD_E_INVALID_ARGUMENT);

  std::string report_json = temp_path("rd_capi_report.json");
  std::string report_csv = temp_path("rd_capi_report.csv");
  REQUIRE(rd_report_save(report, report_json.c_str()) == RD_OK);
  REQUIRE(rd_report_save_csv(report, report_csv.c_str()) == RD_OK);
  CHECK(slurp(report_csv).rfind("episode,policy,phase1,refined\n", 0) == 0);

  // trajectory recording + rebuilding a dataset from the file
  std::string traj = temp_path("rd_capi_traj.tsv");
  std::string schema = temp_path("rd_capi_schema.json");
  extract.episodes = 5;
  REQUIRE(rd_record_trajectories(world, reloaded, &extract, 3, traj.c_str()) == RD_OK);
  REQUIRE(rd_world_save_schema(world, schema.c_str()) == RD_OK);
  rd_dataset* from_file = nullptr;
  REQUIRE(rd_dataset_from_trajectories(traj.c_str(), schema.c_str(), 0.9, &from_file) == RD_OK);
  int64_t file_size = 0;
  REQUIRE(rd_dataset_size(from_file, &file_size) == RD_OK);
  CHECK(file_size > 0);

  // dataset csv round trip plus the single-label ablation
  std::string csv = temp_path("rd_capi_data.csv");
  std::string csv_schema = csv + ".schema.json";
  REQUIRE(rd_dataset_save_csv(dataset, csv.c_str(), csv_schema.c_str()) == RD_OK);
  rd_dataset* from_csv = nullptr;
  REQUIRE(rd_dataset_load_csv(csv.c_str(), csv_schema.c_str(), &from_csv) == RD_OK);
  rd_dataset* single = nullptr;
  REQUIRE(rd_dataset_single_label(from_csv, 5, &single) == RD_OK);
  int64_t single_size = 0;
  REQUIRE(rd_dataset_size(single, &single_size) == RD_OK);
  CHECK(single_size == size);

  for (const char* p : {qpath.c_str(), rpath.c_str(), tpath.c_str(), report_json.c_str(),
                        report_csv.c_str(), traj.c_str(), schema.c_str(), csv.c_str(),
                        csv_schema.c_str()})
    std::remove(p);

  rd_dataset_free(single);
  rd_dataset_free(from_csv);
  rd_dataset_free(from_file);
  rd_report_free(report);
  rd_eval_free(eval);
  rd_rulelist_free(flat);
  rd_tree_free(tree2);
  rd_tree_free(tree);
  rd_rulelist_free(rules2);
  rd_rulelist_free(rules);
  rd_dataset_free(dataset);
  rd_qtable_free(reloaded);
  rd_qtable_free(table);
  rd_world_free(world);
}
