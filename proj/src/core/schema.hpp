#ifndef RULEDIST_CORE_SCHEMA_HPP
#define RULEDIST_CORE_SCHEMA_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ruledist {

enum class FeatureKind { Discrete, Continuous };

// A cell of an instance: index into the feature's domain for discrete
// features, a plain number for continuous ones. Which alternative is valid
// is dictated by the schema, not the value itself.
using Value = std::variant<std::int32_t, double>;

inline Value symbol_value(std::int32_t domain_index) { return Value(std::in_place_index<0>, domain_index); }
inline Value number_value(double v) { return Value(std::in_place_index<1>, v); }

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::Discrete;
  std::vector<std::string> domain;  // discrete only, nonempty

  bool operator==(const Feature&) const = default;
};

// Nonempty set of class labels, stored as a bitmask over the schema's label
// indices. Schemas are capped at 64 labels (checked on construction).
class LabelSet {
 public:
  LabelSet() = default;

  static LabelSet single(int label) { return LabelSet(std::uint64_t{1} << label); }
  static LabelSet from_mask(std::uint64_t mask) { return LabelSet(mask); }

  void add(int label) { mask_ |= std::uint64_t{1} << label; }
  bool contains(int label) const { return (mask_ >> label) & 1; }
  bool empty() const { return mask_ == 0; }
  int count() const { return __builtin_popcountll(mask_); }
  std::uint64_t mask() const { return mask_; }

  // Label indices in ascending order.
  std::vector<int> labels() const;

  bool operator==(const LabelSet&) const = default;

 private:
  explicit LabelSet(std::uint64_t mask) : mask_(mask) {}
  std::uint64_t mask_ = 0;
};

class FeatureSchema {
 public:
  FeatureSchema(std::vector<Feature> features, std::vector<std::string> labels);

  const std::vector<Feature>& features() const { return features_; }
  const Feature& feature(std::size_t index) const { return features_.at(index); }
  std::size_t feature_count() const { return features_.size(); }

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t label_count() const { return labels_.size(); }
  const std::string& label_name(int index) const { return labels_.at(index); }

  // -1 when the name is unknown.
  int feature_index(const std::string& name) const;
  int label_index(const std::string& name) const;
  // Index of `symbol` in the feature's domain, -1 when absent.
  int domain_index(std::size_t feature, const std::string& symbol) const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<Feature> features_;
  std::vector<std::string> labels_;
};

using SchemaPtr = std::shared_ptr<const FeatureSchema>;

struct Instance {
  std::vector<Value> values;  // one per schema feature
  LabelSet labels;            // nonempty

  bool operator==(const Instance&) const = default;
};

// Throws ErrorKind::Schema when the values do not fit the schema.
void check_values(const FeatureSchema& schema, std::span<const Value> values);

// Instances with set-valued labels over a shared schema. Immutable after
// construction; every instance is validated against the schema.
class DataSet {
 public:
  explicit DataSet(SchemaPtr schema, std::vector<Instance> instances = {});

  const FeatureSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }

  const std::vector<Instance>& instances() const { return instances_; }
  const Instance& instance(std::size_t i) const { return instances_[i]; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }

  // Per-label count of instances whose label set contains the label.
  std::vector<std::int64_t> label_containment_counts() const;

  // Sum of label-set sizes, i.e. the number of (instance, label) pairs.
  std::int64_t total_label_count() const;

 private:
  SchemaPtr schema_;
  std::vector<Instance> instances_;
};

// Ablation helper: collapses each label set to one uniformly drawn label.
DataSet sample_single_labels(const DataSet& data, std::uint64_t seed);

}  // namespace ruledist

#endif
