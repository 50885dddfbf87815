#ifndef RULEDIST_CORE_HEURISTICS_HPP
#define RULEDIST_CORE_HEURISTICS_HPP

#include <cstdint>
#include <span>

#include "core/rules.hpp"
#include "core/schema.hpp"

namespace ruledist {

// Counts backing the rule-quality heuristics, for one candidate class.
//
// total/covered count distinct instances. pos_* count instances whose label
// set contains the class. neg_* are the per-label expansion negatives used
// by classical WRA: an instance labelled {A,B} contributes one positive and
// one negative sample for class A, so pos+neg equals the number of
// (instance, label) pairs. On single-label data that reduces to the usual
// positive/negative split.
struct HeuristicCounts {
  std::int64_t total = 0;        // E
  std::int64_t covered = 0;      // Ê
  std::int64_t pos_total = 0;    // P
  std::int64_t pos_covered = 0;  // P̂
  std::int64_t neg_total = 0;    // N
  std::int64_t neg_covered = 0;  // N̂
};

enum class Heuristic { Wra, WraSet };

HeuristicCounts compute_counts(const DataSet& data, const Rule& rule, int label);

// Classical weighted relative accuracy over the expanded counts:
//   ((P̂+N̂)/(P+N)) * (P̂/(P̂+N̂) - P/(P+N))
// Returns 0 for rules covering nothing; throws on an empty dataset.
double wra(const HeuristicCounts& c);

// Set-valued weighted relative accuracy over distinct-sample counts:
//   (Ê/E) * (P̂/Ê - P/E)
// Same edge behaviour as wra.
double wra_set(const HeuristicCounts& c);

double heuristic_value(Heuristic h, const HeuristicCounts& c);

// Label contained in the most covered instances. Ties fall back to the
// highest global count, then the lowest label index (schema order).
int majority_class(std::span<const std::int64_t> covered_counts,
                   std::span<const std::int64_t> global_counts);
int majority_class(const DataSet& covered, const DataSet& full);

// CN2-style likelihood-ratio statistic of the covered class distribution
// against the distribution expected from the full set.
double likelihood_ratio(std::span<const std::int64_t> covered_counts, std::int64_t covered,
                        std::span<const std::int64_t> global_counts, std::int64_t total);

}  // namespace ruledist

#endif
