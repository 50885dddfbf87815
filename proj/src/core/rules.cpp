#include "core/rules.hpp"

#include <algorithm>
#include <sstream>

#include "core/dataset_io.hpp"
#include "core/error.hpp"

namespace ruledist {

using nlohmann::json;

const char* op_name(Op op) {
  switch (op) {
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Le: return "<=";
    case Op::Ge: return ">=";
  }
  return "?";
}

std::vector<Condition> Rule::canonical_antecedent() const {
  std::vector<Condition> sorted = antecedent;
  std::sort(sorted.begin(), sorted.end(), [](const Condition& a, const Condition& b) {
    if (a.feature != b.feature) return a.feature < b.feature;
    if (a.op != b.op) return a.op < b.op;
    return a.value < b.value;
  });
  return sorted;
}

bool operator==(const Rule& a, const Rule& b) {
  return a.label == b.label && a.canonical_antecedent() == b.canonical_antecedent();
}

void validate_rule(const FeatureSchema& schema, const Rule& rule) {
  if (rule.label < 0 || static_cast<std::size_t>(rule.label) >= schema.label_count())
    raise(ErrorKind::Schema, "rule consequent out of range");
  for (const auto& cond : rule.antecedent) {
    if (cond.feature < 0 || static_cast<std::size_t>(cond.feature) >= schema.feature_count())
      raise(ErrorKind::Schema, "condition references unknown feature");
    const Feature& f = schema.feature(cond.feature);
    bool discrete_op = cond.op == Op::Eq || cond.op == Op::Ne;
    if (discrete_op != (f.kind == FeatureKind::Discrete))
      raise(ErrorKind::Schema, std::string("operator ") + op_name(cond.op) +
                                   " does not apply to feature '" + f.name + "'");
    if (discrete_op) {
      const auto* sym = std::get_if<std::int32_t>(&cond.value);
      if (!sym || *sym < 0 || static_cast<std::size_t>(*sym) >= f.domain.size())
        raise(ErrorKind::Schema, "condition value outside domain of '" + f.name + "'");
    } else if (!std::holds_alternative<double>(cond.value)) {
      raise(ErrorKind::Schema, "condition on '" + f.name + "' must carry a number");
    }
  }
}

bool condition_holds(const FeatureSchema& schema, const Condition& cond, std::span<const Value> values) {
  if (cond.feature < 0 || static_cast<std::size_t>(cond.feature) >= schema.feature_count())
    raise(ErrorKind::Schema, "condition references unknown feature");
  const Value& v = values[cond.feature];
  switch (cond.op) {
    case Op::Eq: return std::get<std::int32_t>(v) == std::get<std::int32_t>(cond.value);
    case Op::Ne: return std::get<std::int32_t>(v) != std::get<std::int32_t>(cond.value);
    case Op::Le: return std::get<double>(v) <= std::get<double>(cond.value);
    case Op::Ge: return std::get<double>(v) >= std::get<double>(cond.value);
  }
  return false;
}

bool matches(const FeatureSchema& schema, const Rule& rule, std::span<const Value> values) {
  for (const auto& cond : rule.antecedent)
    if (!condition_holds(schema, cond, values)) return false;
  return true;
}

std::pair<DataSet, DataSet> coverage_split(const Rule& rule, const DataSet& data) {
  validate_rule(data.schema(), rule);
  std::vector<Instance> covered, uncovered;
  for (const auto& inst : data.instances()) {
    if (matches(data.schema(), rule, inst.values))
      covered.push_back(inst);
    else
      uncovered.push_back(inst);
  }
  return {DataSet(data.schema_ptr(), std::move(covered)),
          DataSet(data.schema_ptr(), std::move(uncovered))};
}

RuleList::RuleList(SchemaPtr schema, std::vector<Rule> rules)
    : schema_(std::move(schema)), rules_(std::move(rules)) {
  if (!schema_) raise(ErrorKind::InvalidArgument, "rule list: null schema");
  if (rules_.empty()) raise(ErrorKind::Schema, "rule list must contain at least the default rule");
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    validate_rule(*schema_, rules_[i]);
    if (rules_[i].is_default() && i + 1 != rules_.size())
      raise(ErrorKind::Schema, "only the final rule may have an empty antecedent");
  }
  if (!rules_.back().is_default())
    raise(ErrorKind::Schema, "rule list must end with a default (IF TRUE) rule");
}

RuleList::Prediction RuleList::predict(std::span<const Value> values) const {
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (matches(*schema_, rules_[i], values)) return {rules_[i].label, i};
  raise(ErrorKind::State, "unreachable: default rule did not match");
}

bool RuleList::operator==(const RuleList& other) const {
  return *schema_ == *other.schema_ && rules_ == other.rules_;
}

// --- text format ---------------------------------------------------------

std::string render_condition(const FeatureSchema& schema, const Condition& cond) {
  const Feature& f = schema.feature(cond.feature);
  std::string op;
  switch (cond.op) {
    case Op::Eq: op = "="; break;
    case Op::Ne: op = "!="; break;
    case Op::Le: op = "<="; break;
    case Op::Ge: op = ">="; break;
  }
  return f.name + op + value_to_string(schema, cond.feature, cond.value);
}

std::string render_antecedent(const FeatureSchema& schema, const std::vector<Condition>& antecedent) {
  if (antecedent.empty()) return "TRUE";
  // A >=v/<=v pair on one feature displays as a single equality.
  std::vector<bool> consumed(antecedent.size(), false);
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < antecedent.size(); ++i) {
    if (consumed[i]) continue;
    const Condition& c = antecedent[i];
    bool collapsed = false;
    if (c.op == Op::Le || c.op == Op::Ge) {
      Op partner = c.op == Op::Le ? Op::Ge : Op::Le;
      for (std::size_t j = i + 1; j < antecedent.size() && !collapsed; ++j) {
        if (!consumed[j] && antecedent[j].feature == c.feature && antecedent[j].op == partner &&
            antecedent[j].value == c.value) {
          consumed[j] = true;
          parts.push_back(schema.feature(c.feature).name + "=" +
                          value_to_string(schema, c.feature, c.value));
          collapsed = true;
        }
      }
    }
    if (!collapsed) parts.push_back(render_condition(schema, c));
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " AND ";
    out += parts[i];
  }
  return out;
}

std::string render_rule(const FeatureSchema& schema, const Rule& rule) {
  return "IF " + render_antecedent(schema, rule.antecedent) + " THEN Class=" +
         schema.label_name(rule.label);
}

std::string render_rulelist(const RuleList& list) {
  std::ostringstream out;
  for (std::size_t i = 0; i < list.size(); ++i)
    out << (i + 1) << ". " << render_rule(list.schema(), list.rules()[i]) << '\n';
  return out.str();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Condition make_parsed_condition(const FeatureSchema& schema, int feature, Op op,
                                const std::string& value_text) {
  Condition cond;
  cond.feature = feature;
  cond.op = op;
  cond.value = value_from_string(schema, feature, value_text);
  return cond;
}

void parse_condition_into(const FeatureSchema& schema, const std::string& token,
                          std::vector<Condition>& out) {
  // Two-character operators first so "<=" is not read as "=".
  static const struct { const char* text; Op op; } kOps[] = {
      {"!=", Op::Ne}, {"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq}, {"=", Op::Eq}};
  for (const auto& candidate : kOps) {
    std::size_t pos = token.find(candidate.text);
    if (pos == std::string::npos || pos == 0) continue;
    std::string name = trim(token.substr(0, pos));
    std::string value = trim(token.substr(pos + std::string(candidate.text).size()));
    int feature = schema.feature_index(name);
    if (feature < 0) raise(ErrorKind::Schema, "unknown feature '" + name + "'");
    const Feature& f = schema.feature(feature);
    if (candidate.op == Op::Eq && f.kind == FeatureKind::Continuous) {
      // X=19 on a continuous feature stands for the >=/<= pair.
      out.push_back(make_parsed_condition(schema, feature, Op::Ge, value));
      out.push_back(make_parsed_condition(schema, feature, Op::Le, value));
    } else {
      out.push_back(make_parsed_condition(schema, feature, candidate.op, value));
    }
    return;
  }
  raise(ErrorKind::Parse, "cannot parse condition '" + token + "'");
}

}  // namespace

std::vector<Condition> parse_antecedent(const FeatureSchema& schema, const std::string& text) {
  std::vector<Condition> out;
  std::string body = trim(text);
  if (body == "TRUE") return out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t next = body.find(" AND ", pos);
    std::string token =
        next == std::string::npos ? body.substr(pos) : body.substr(pos, next - pos);
    parse_condition_into(schema, trim(token), out);
    if (next == std::string::npos) break;
    pos = next + 5;
  }
  return out;
}

RuleList parse_rulelist(const std::string& text, const SchemaPtr& schema) {
  std::vector<Rule> rules;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    // Optional leading "N." numbering.
    std::size_t i = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
    if (i > 0 && i < body.size() && body[i] == '.') body = trim(body.substr(i + 1));

    if (body.rfind("IF ", 0) != 0)
      raise(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 'IF ...'");
    std::size_t then_pos = body.find(" THEN Class=");
    if (then_pos == std::string::npos)
      raise(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 'THEN Class=...'");
    Rule rule;
    rule.antecedent = parse_antecedent(*schema, body.substr(3, then_pos - 3));
    std::string label = trim(body.substr(then_pos + 12));
    int idx = schema->label_index(label);
    if (idx < 0) raise(ErrorKind::Parse, "line " + std::to_string(lineno) + ": unknown label '" + label + "'");
    rule.label = idx;
    rules.push_back(std::move(rule));
  }
  return RuleList(schema, std::move(rules));
}

// --- structured format ---------------------------------------------------

json rule_to_json(const FeatureSchema& schema, const Rule& rule) {
  json conditions = json::array();
  for (const auto& cond : rule.antecedent) {
    json c;
    c["feature"] = schema.feature(cond.feature).name;
    c["op"] = op_name(cond.op);
    if (cond.op == Op::Eq || cond.op == Op::Ne)
      c["value"] = schema.feature(cond.feature).domain.at(std::get<std::int32_t>(cond.value));
    else
      c["value"] = std::get<double>(cond.value);
    conditions.push_back(c);
  }
  json doc;
  doc["if"] = conditions;
  doc["then"] = schema.label_name(rule.label);
  doc["stats"] = {{"covered", rule.stats.covered},
                  {"positives", rule.stats.positives},
                  {"heuristic", rule.stats.heuristic}};
  return doc;
}

Rule rule_from_json(const FeatureSchema& schema, const json& doc) {
  Rule rule;
  for (const auto& c : doc.at("if")) {
    Condition cond;
    std::string name = c.at("feature").get<std::string>();
    int feature = schema.feature_index(name);
    if (feature < 0) raise(ErrorKind::Schema, "unknown feature '" + name + "'");
    cond.feature = feature;
    std::string op = c.at("op").get<std::string>();
    if (op == "==") cond.op = Op::Eq;
    else if (op == "!=") cond.op = Op::Ne;
    else if (op == "<=") cond.op = Op::Le;
    else if (op == ">=") cond.op = Op::Ge;
    else raise(ErrorKind::Parse, "unknown operator '" + op + "'");
    if (cond.op == Op::Eq || cond.op == Op::Ne) {
      std::string sym = c.at("value").get<std::string>();
      int idx = schema.domain_index(feature, sym);
      if (idx < 0) raise(ErrorKind::Schema, "value '" + sym + "' not in domain of '" + name + "'");
      cond.value = symbol_value(idx);
    } else {
      cond.value = number_value(c.at("value").get<double>());
    }
    rule.antecedent.push_back(std::move(cond));
  }
  std::string label = doc.at("then").get<std::string>();
  int idx = schema.label_index(label);
  if (idx < 0) raise(ErrorKind::Schema, "unknown label '" + label + "'");
  rule.label = idx;
  if (doc.contains("stats")) {
    rule.stats.covered = doc["stats"].value("covered", std::int64_t{0});
    rule.stats.positives = doc["stats"].value("positives", std::int64_t{0});
    rule.stats.heuristic = doc["stats"].value("heuristic", 0.0);
  }
  return rule;
}

std::string rulelist_to_json_text(const RuleList& list) {
  json doc;
  doc["schema"] = json::parse(schema_to_json(list.schema()));
  json rules = json::array();
  for (const auto& rule : list.rules()) rules.push_back(rule_to_json(list.schema(), rule));
  doc["rules"] = rules;
  return doc.dump(2) + "\n";
}

RuleList rulelist_from_json_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) raise(ErrorKind::Parse, "rule list: invalid JSON");
  SchemaPtr schema = parse_schema_json(doc.at("schema").dump());
  std::vector<Rule> rules;
  for (const auto& r : doc.at("rules")) rules.push_back(rule_from_json(*schema, r));
  return RuleList(schema, std::move(rules));
}

void save_rulelist(const RuleList& list, const std::string& path) {
  write_text_file(path, rulelist_to_json_text(list));
}

RuleList load_rulelist(const std::string& path) {
  try {
    return rulelist_from_json_text(read_text_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    raise(e.kind(), std::string(e.what()) + " (in '" + path + "')");
  }
}

}  // namespace ruledist
