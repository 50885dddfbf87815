#include "core/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/dataset_io.hpp"
#include "core/error.hpp"

namespace ruledist {

void validate_extraction(const ExtractionConfig& config) {
  if (!(config.tau > 0 && config.tau <= 1)) raise(ErrorKind::Config, "tau must be in (0, 1]");
  if (config.episodes < 0) raise(ErrorKind::Config, "episodes must be nonnegative");
  if (config.step_cap < 1) raise(ErrorKind::Config, "step_cap must be positive");
}

LabelSet action_set(std::span<const double> scores, double tau) {
  if (!(tau > 0 && tau <= 1)) raise(ErrorKind::Config, "tau must be in (0, 1]");
  if (scores.empty()) raise(ErrorKind::InvalidArgument, "action_set: no actions");
  double shift = *std::min_element(scores.begin(), scores.end());
  if (shift > 0) shift = 0;
  double best = *std::max_element(scores.begin(), scores.end()) - shift;
  const double threshold = tau * best;
  LabelSet out;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] - shift >= threshold) out.add(static_cast<int>(i));
  return out;
}

std::vector<int> argmax_set(std::span<const double> scores) {
  if (scores.empty()) raise(ErrorKind::InvalidArgument, "argmax_set: no actions");
  double best = *std::max_element(scores.begin(), scores.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] == best) out.push_back(static_cast<int>(i));
  return out;
}

int greedy_action(std::span<const double> scores, Rng& rng) {
  auto maxima = argmax_set(scores);
  return maxima[rng.next_below(maxima.size())];
}

namespace {

void check_distribution(const std::vector<double>& probs, std::size_t label_count,
                        ExtractionMode mode) {
  if (probs.size() != label_count)
    raise(ErrorKind::Schema, "policy returned " + std::to_string(probs.size()) +
                                 " action scores, schema has " + std::to_string(label_count));
  if (mode == ExtractionMode::Distribution) {
    double total = 0;
    for (double p : probs) {
      if (p < 0) raise(ErrorKind::InvalidArgument, "action probability below zero");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      raise(ErrorKind::InvalidArgument, "action probabilities do not sum to 1");
  }
}

}  // namespace

std::vector<Trajectory> record_trajectories(const StochasticPolicy& policy, Environment& env,
                                            const ExtractionConfig& config, std::uint64_t seed) {
  validate_extraction(config);
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(config.episodes));
  for (std::int64_t ep = 0; ep < config.episodes; ++ep) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(ep));
    Trajectory traj;
    traj.episode = ep;
    EnvStep initial = env.reset(rng);
    std::vector<Value> state = std::move(initial.state);
    bool done = initial.done;
    for (std::int64_t t = 0; t < config.step_cap && !done; ++t) {
      std::vector<double> probs = policy.distribution(state);
      check_distribution(probs, env.schema().label_count(), ExtractionMode::Distribution);
      std::vector<double> recorded =
          config.mode == ExtractionMode::QValues ? policy.scores(state) : probs;
      check_distribution(recorded, env.schema().label_count(), config.mode);
      int action = config.greedy ? greedy_action(probs, rng)
                                 : static_cast<int>(rng.sample_weighted(probs));
      EnvStep step = env.step(action);
      traj.steps.push_back(TrajectoryStep{std::move(state), std::move(recorded), action, step.reward});
      state = std::move(step.state);
      done = step.done;
    }
    traj.truncated = !done;
    out.push_back(std::move(traj));
  }
  return out;
}

DataSet build_dataset(const std::vector<Trajectory>& trajectories, const SchemaPtr& schema,
                      double tau) {
  std::vector<Instance> instances;
  for (const auto& traj : trajectories) {
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
      const TrajectoryStep& step = traj.steps[t];
      auto where = [&] {
        return " (episode " + std::to_string(traj.episode) + ", step " + std::to_string(t) + ")";
      };
      try {
        check_values(*schema, step.state);
      } catch (const Error& e) {
        raise(ErrorKind::Schema, std::string(e.what()) + where());
      }
      if (step.distribution.size() != schema->label_count())
        raise(ErrorKind::Schema, "distribution size does not match the label count" + where());
      instances.push_back(Instance{step.state, action_set(step.distribution, tau)});
    }
  }
  return DataSet(schema, std::move(instances));
}

void save_trajectories(const std::vector<Trajectory>& trajectories, const FeatureSchema& schema,
                       const std::string& path) {
  std::ostringstream out;
  out << "episode\tstep";
  for (const auto& f : schema.features()) out << '\t' << f.name;
  out << "\tprobs\taction\treward\tdone\n";
  for (const auto& traj : trajectories) {
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
      const TrajectoryStep& step = traj.steps[t];
      out << traj.episode << '\t' << t;
      for (std::size_t i = 0; i < schema.feature_count(); ++i)
        out << '\t' << value_to_string(schema, i, step.state[i]);
      out << '\t';
      for (std::size_t i = 0; i < step.distribution.size(); ++i) {
        if (i) out << ';';
        out << format_double(step.distribution[i]);
      }
      bool final_step = t + 1 == traj.steps.size();
      out << '\t' << schema.label_name(step.action) << '\t' << format_double(step.reward) << '\t'
          << (final_step && !traj.truncated ? 1 : 0) << '\n';
    }
  }
  write_text_file(path, out.str());
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) out.push_back(field);
  return out;
}

double parse_number(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    raise(ErrorKind::Parse, "expected a number in " + context + ", got '" + text + "'");
  }
}

}  // namespace

std::vector<Trajectory> load_trajectories(const std::string& path, const SchemaPtr& schema) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::Parse, "trajectory file '" + path + "' is empty");
  const std::size_t columns = schema->feature_count() + 6;
  if (split_tabs(line).size() != columns)
    raise(ErrorKind::Parse, "trajectory file '" + path + "': header does not match the schema");

  std::vector<Trajectory> out;
  std::size_t lineno = 1;
  bool last_done = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string context = "'" + path + "' line " + std::to_string(lineno);
    auto fields = split_tabs(line);
    if (fields.size() != columns) raise(ErrorKind::Parse, context + ": wrong field count");

    std::int64_t episode = static_cast<std::int64_t>(parse_number(fields[0], context));
    if (out.empty() || out.back().episode != episode) {
      if (!out.empty()) out.back().truncated = !last_done;
      out.push_back(Trajectory{episode, {}, false});
    }
    TrajectoryStep step;
    for (std::size_t i = 0; i < schema->feature_count(); ++i)
      step.state.push_back(value_from_string(*schema, i, fields[2 + i]));
    std::istringstream probs(fields[2 + schema->feature_count()]);
    std::string p;
    while (std::getline(probs, p, ';')) step.distribution.push_back(parse_number(p, context));
    if (step.distribution.size() != schema->label_count())
      raise(ErrorKind::Parse, context + ": wrong distribution size");
    int action = schema->label_index(fields[3 + schema->feature_count()]);
    if (action < 0) raise(ErrorKind::Parse, context + ": unknown action");
    step.action = action;
    step.reward = parse_number(fields[4 + schema->feature_count()], context);
    last_done = fields[5 + schema->feature_count()] == "1";
    out.back().steps.push_back(std::move(step));
  }
  if (!out.empty()) out.back().truncated = !last_done;
  return out;
}

}  // namespace ruledist
