#include "core/heuristics.hpp"

#include <cmath>

#include "core/error.hpp"

namespace ruledist {

HeuristicCounts compute_counts(const DataSet& data, const Rule& rule, int label) {
  validate_rule(data.schema(), rule);
  HeuristicCounts c;
  c.total = static_cast<std::int64_t>(data.size());
  for (const auto& inst : data.instances()) {
    bool pos = inst.labels.contains(label);
    std::int64_t neg = inst.labels.count() - (pos ? 1 : 0);
    c.pos_total += pos;
    c.neg_total += neg;
    if (matches(data.schema(), rule, inst.values)) {
      ++c.covered;
      c.pos_covered += pos;
      c.neg_covered += neg;
    }
  }
  return c;
}

double wra(const HeuristicCounts& c) {
  if (c.total == 0) raise(ErrorKind::EmptyDataset, "wra: empty dataset");
  const double all = static_cast<double>(c.pos_total + c.neg_total);
  const double cov = static_cast<double>(c.pos_covered + c.neg_covered);
  if (cov == 0) return 0;
  return (cov / all) * (static_cast<double>(c.pos_covered) / cov -
                        static_cast<double>(c.pos_total) / all);
}

double wra_set(const HeuristicCounts& c) {
  if (c.total == 0) raise(ErrorKind::EmptyDataset, "wra_set: empty dataset");
  if (c.covered == 0) return 0;
  const double e = static_cast<double>(c.total);
  const double e_hat = static_cast<double>(c.covered);
  return (e_hat / e) * (static_cast<double>(c.pos_covered) / e_hat -
                        static_cast<double>(c.pos_total) / e);
}

double heuristic_value(Heuristic h, const HeuristicCounts& c) {
  return h == Heuristic::Wra ? wra(c) : wra_set(c);
}

int majority_class(std::span<const std::int64_t> covered_counts,
                   std::span<const std::int64_t> global_counts) {
  int best = -1;
  for (std::size_t i = 0; i < covered_counts.size(); ++i) {
    if (covered_counts[i] == 0) continue;
    if (best < 0 || covered_counts[i] > covered_counts[best] ||
        (covered_counts[i] == covered_counts[best] && global_counts[i] > global_counts[best]))
      best = static_cast<int>(i);
  }
  if (best < 0) raise(ErrorKind::EmptyDataset, "majority_class: no covered instances");
  return best;
}

int majority_class(const DataSet& covered, const DataSet& full) {
  if (covered.empty()) raise(ErrorKind::EmptyDataset, "majority_class: no covered instances");
  auto covered_counts = covered.label_containment_counts();
  auto global_counts = full.label_containment_counts();
  return majority_class(covered_counts, global_counts);
}

double likelihood_ratio(std::span<const std::int64_t> covered_counts, std::int64_t covered,
                        std::span<const std::int64_t> global_counts, std::int64_t total) {
  if (total == 0 || covered == 0) return 0;
  double lrs = 0;
  for (std::size_t i = 0; i < covered_counts.size(); ++i) {
    if (covered_counts[i] == 0 || global_counts[i] == 0) continue;
    const double observed = static_cast<double>(covered_counts[i]);
    const double expected =
        static_cast<double>(covered) * static_cast<double>(global_counts[i]) / static_cast<double>(total);
    lrs += observed * std::log(observed / expected);
  }
  return 2 * lrs;
}

}  // namespace ruledist
