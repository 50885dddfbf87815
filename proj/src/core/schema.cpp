#include "core/schema.hpp"

#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace ruledist {

std::vector<int> LabelSet::labels() const {
  std::vector<int> out;
  for (int i = 0; i < 64; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

FeatureSchema::FeatureSchema(std::vector<Feature> features, std::vector<std::string> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (labels_.empty()) raise(ErrorKind::Schema, "schema: label set must be nonempty");
  if (labels_.size() > 64) raise(ErrorKind::Schema, "schema: at most 64 labels supported");
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (f.name.empty()) raise(ErrorKind::Schema, "schema: feature names must be nonempty");
    if (!seen.insert(f.name).second)
      raise(ErrorKind::Schema, "schema: duplicate feature name '" + f.name + "'");
    if (f.kind == FeatureKind::Discrete) {
      if (f.domain.empty())
        raise(ErrorKind::Schema, "schema: discrete feature '" + f.name + "' has empty domain");
      std::set<std::string> dom(f.domain.begin(), f.domain.end());
      if (dom.size() != f.domain.size())
        raise(ErrorKind::Schema, "schema: duplicate domain value in feature '" + f.name + "'");
    } else if (!f.domain.empty()) {
      raise(ErrorKind::Schema, "schema: continuous feature '" + f.name + "' cannot have a domain");
    }
  }
  std::set<std::string> lab(labels_.begin(), labels_.end());
  if (lab.size() != labels_.size()) raise(ErrorKind::Schema, "schema: duplicate label");
}

int FeatureSchema::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return static_cast<int>(i);
  return -1;
}

int FeatureSchema::label_index(const std::string& name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == name) return static_cast<int>(i);
  return -1;
}

int FeatureSchema::domain_index(std::size_t feature, const std::string& symbol) const {
  const auto& dom = features_.at(feature).domain;
  for (std::size_t i = 0; i < dom.size(); ++i)
    if (dom[i] == symbol) return static_cast<int>(i);
  return -1;
}

void check_values(const FeatureSchema& schema, std::span<const Value> values) {
  if (values.size() != schema.feature_count())
    raise(ErrorKind::Schema, "instance has " + std::to_string(values.size()) + " values, schema has " +
                                 std::to_string(schema.feature_count()) + " features");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Feature& f = schema.feature(i);
    if (f.kind == FeatureKind::Discrete) {
      const auto* sym = std::get_if<std::int32_t>(&values[i]);
      if (!sym) raise(ErrorKind::Schema, "feature '" + f.name + "': expected a symbol");
      if (*sym < 0 || static_cast<std::size_t>(*sym) >= f.domain.size())
        raise(ErrorKind::Schema, "feature '" + f.name + "': symbol index out of domain");
    } else {
      if (!std::holds_alternative<double>(values[i]))
        raise(ErrorKind::Schema, "feature '" + f.name + "': expected a number");
    }
  }
}

DataSet::DataSet(SchemaPtr schema, std::vector<Instance> instances)
    : schema_(std::move(schema)), instances_(std::move(instances)) {
  if (!schema_) raise(ErrorKind::InvalidArgument, "dataset: null schema");
  const std::uint64_t label_space =
      schema_->label_count() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << schema_->label_count()) - 1;
  for (const auto& inst : instances_) {
    check_values(*schema_, inst.values);
    if (inst.labels.empty()) raise(ErrorKind::Schema, "instance has an empty label set");
    if (inst.labels.mask() & ~label_space)
      raise(ErrorKind::Schema, "instance label set contains indices outside the schema");
  }
}

std::vector<std::int64_t> DataSet::label_containment_counts() const {
  std::vector<std::int64_t> counts(schema_->label_count(), 0);
  for (const auto& inst : instances_)
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (inst.labels.contains(static_cast<int>(c))) ++counts[c];
  return counts;
}

std::int64_t DataSet::total_label_count() const {
  std::int64_t total = 0;
  for (const auto& inst : instances_) total += inst.labels.count();
  return total;
}

DataSet sample_single_labels(const DataSet& data, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0x51);
  std::vector<Instance> out;
  out.reserve(data.size());
  for (const auto& inst : data.instances()) {
    auto options = inst.labels.labels();
    int pick = options[rng.next_below(options.size())];
    out.push_back(Instance{inst.values, LabelSet::single(pick)});
  }
  return DataSet(data.schema_ptr(), std::move(out));
}

}  // namespace ruledist
