#include "core/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace ruledist {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) raise(ErrorKind::Io, "failed writing '" + path + "'");
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) raise(ErrorKind::InvalidArgument, "format_double failed");
  return std::string(buf, end);
}

SchemaPtr parse_schema_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) raise(ErrorKind::Parse, "schema: invalid JSON");
  if (!doc.contains("features") || !doc.contains("labels"))
    raise(ErrorKind::Parse, "schema: missing 'features' or 'labels'");
  std::vector<Feature> features;
  for (const auto& f : doc["features"]) {
    Feature feat;
    feat.name = f.at("name").get<std::string>();
    std::string kind = f.at("kind").get<std::string>();
    if (kind == "discrete") {
      feat.kind = FeatureKind::Discrete;
      for (const auto& v : f.at("domain")) feat.domain.push_back(v.get<std::string>());
    } else if (kind == "continuous") {
      feat.kind = FeatureKind::Continuous;
    } else {
      raise(ErrorKind::Parse, "schema: unknown feature kind '" + kind + "'");
    }
    features.push_back(std::move(feat));
  }
  std::vector<std::string> labels;
  for (const auto& l : doc["labels"]) labels.push_back(l.get<std::string>());
  return std::make_shared<FeatureSchema>(std::move(features), std::move(labels));
}

std::string schema_to_json(const FeatureSchema& schema) {
  json features = json::array();
  for (const auto& f : schema.features()) {
    json item;
    item["name"] = f.name;
    item["kind"] = f.kind == FeatureKind::Discrete ? "discrete" : "continuous";
    if (f.kind == FeatureKind::Discrete) item["domain"] = f.domain;
    features.push_back(item);
  }
  json doc;
  doc["features"] = features;
  doc["labels"] = schema.labels();
  return doc.dump(2) + "\n";
}

SchemaPtr load_schema(const std::string& path) {
  try {
    return parse_schema_json(read_text_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    raise(e.kind(), std::string(e.what()) + " (in '" + path + "')");
  }
}

void save_schema(const FeatureSchema& schema, const std::string& path) {
  write_text_file(path, schema_to_json(schema));
}

std::string value_to_string(const FeatureSchema& schema, std::size_t feature, const Value& value) {
  const Feature& f = schema.feature(feature);
  if (f.kind == FeatureKind::Discrete) return f.domain.at(std::get<std::int32_t>(value));
  return format_double(std::get<double>(value));
}

Value value_from_string(const FeatureSchema& schema, std::size_t feature, const std::string& text) {
  const Feature& f = schema.feature(feature);
  if (f.kind == FeatureKind::Discrete) {
    int idx = schema.domain_index(feature, text);
    if (idx < 0)
      raise(ErrorKind::Schema, "value '" + text + "' not in domain of feature '" + f.name + "'");
    return symbol_value(idx);
  }
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    raise(ErrorKind::Parse, "expected a number for feature '" + f.name + "', got '" + text + "'");
  return number_value(v);
}

DataSet load_dataset_csv(const std::string& csv_path, const SchemaPtr& schema) {
  std::istringstream in(read_text_file(csv_path));
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::Parse, "dataset '" + csv_path + "' is empty");
  auto header = split(line, ',');
  if (header.size() != schema->feature_count() + 1 || header.back() != "labels")
    raise(ErrorKind::Parse, "dataset '" + csv_path + "': header must list the schema features plus 'labels'");
  for (std::size_t i = 0; i < schema->feature_count(); ++i)
    if (header[i] != schema->feature(i).name)
      raise(ErrorKind::Parse, "dataset '" + csv_path + "': header column '" + header[i] +
                                  "' does not match schema feature '" + schema->feature(i).name + "'");

  std::vector<Instance> instances;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != header.size())
      raise(ErrorKind::Parse, "dataset '" + csv_path + "' line " + std::to_string(lineno) +
                                  ": wrong field count");
    Instance inst;
    for (std::size_t i = 0; i < schema->feature_count(); ++i)
      inst.values.push_back(value_from_string(*schema, i, fields[i]));
    for (const auto& sym : split(fields.back(), ';')) {
      int idx = schema->label_index(sym);
      if (idx < 0)
        raise(ErrorKind::Parse, "dataset '" + csv_path + "' line " + std::to_string(lineno) +
                                    ": unknown label '" + sym + "'");
      inst.labels.add(idx);
    }
    instances.push_back(std::move(inst));
  }
  return DataSet(schema, std::move(instances));
}

void save_dataset_csv(const DataSet& data, const std::string& csv_path) {
  std::ostringstream out;
  const FeatureSchema& schema = data.schema();
  for (std::size_t i = 0; i < schema.feature_count(); ++i) out << schema.feature(i).name << ',';
  out << "labels\n";
  for (const auto& inst : data.instances()) {
    for (std::size_t i = 0; i < schema.feature_count(); ++i)
      out << value_to_string(schema, i, inst.values[i]) << ',';
    bool first = true;
    for (int label : inst.labels.labels()) {
      if (!first) out << ';';
      out << schema.label_name(label);
      first = false;
    }
    out << '\n';
  }
  write_text_file(csv_path, out.str());
}

}  // namespace ruledist
