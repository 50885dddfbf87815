#ifndef RULEDIST_CORE_DATASET_IO_HPP
#define RULEDIST_CORE_DATASET_IO_HPP

#include <string>

#include "core/schema.hpp"

namespace ruledist {

// Schema files are JSON:
//   {"features": [{"name": "X", "kind": "continuous"},
//                 {"name": "C", "kind": "discrete", "domain": ["A", "B"]}],
//    "labels": ["UP", "RIGHT"]}
SchemaPtr load_schema(const std::string& path);
void save_schema(const FeatureSchema& schema, const std::string& path);

SchemaPtr parse_schema_json(const std::string& text);
std::string schema_to_json(const FeatureSchema& schema);

// Dataset files are CSV with a header row: one column per feature plus a
// final `labels` column holding `;`-separated label symbols.
DataSet load_dataset_csv(const std::string& csv_path, const SchemaPtr& schema);
void save_dataset_csv(const DataSet& data, const std::string& csv_path);

// Value <-> text conversion used by the CSV and trajectory formats.
// Numbers are printed with the shortest representation that parses back to
// the same double.
std::string value_to_string(const FeatureSchema& schema, std::size_t feature, const Value& value);
Value value_from_string(const FeatureSchema& schema, std::size_t feature, const std::string& text);

std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ruledist

#endif
