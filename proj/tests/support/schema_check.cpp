#include "schema_check.hpp"

#include <fstream>
#include <stdexcept>

namespace schema {

using dyngeo::Json;

Checker::Checker(std::string schema_dir) : dir_(std::move(schema_dir)) {}

const Json& Checker::load(const std::string& file) {
  auto it = cache_.find(file);
  if (it != cache_.end()) return it->second;
  std::ifstream in(dir_ + "/" + file);
  if (!in) throw std::runtime_error("cannot open schema " + file);
  return cache_.emplace(file, Json::parse(in)).first->second;
}

std::vector<std::string> Checker::check(const Json& doc, const std::string& schema_file) {
  std::vector<std::string> errors;
  eval(doc, load(schema_file), schema_file, "$", errors);
  return errors;
}

namespace {

bool has_type(const Json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  throw std::runtime_error("unknown type keyword " + type);
}

}  // namespace

void Checker::eval(const Json& doc, const Json& schema, const std::string& file,
                   const std::string& where, std::vector<std::string>& errors) {
  auto fail = [&](const std::string& msg) { errors.push_back(where + ": " + msg); };

  if (schema.contains("$ref")) {
    std::string ref = schema["$ref"];
    std::string target_file = file;
    std::string pointer;
    auto hash = ref.find('#');
    if (hash == std::string::npos) {
      target_file = ref;
    } else {
      if (hash > 0) target_file = ref.substr(0, hash);
      pointer = ref.substr(hash + 1);
    }
    const Json& root = load(target_file);
    const Json& target = pointer.empty() ? root : root.at(Json::json_pointer(pointer));
    eval(doc, target, target_file, where, errors);
  }
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = has_type(doc, t);
    } else {
      for (const auto& option : t) ok = ok || has_type(doc, option);
    }
    if (!ok) {
      fail("expected type " + t.dump());
      return;
    }
  }
  if (schema.contains("const") && doc != schema["const"]) fail("expected " + schema["const"].dump());
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"]) found = found || v == doc;
    if (!found) fail("value " + doc.dump() + " not in enum");
  }
  if (doc.is_number()) {
    double x = doc.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>()) fail("below minimum");
    if (schema.contains("maximum") && x > schema["maximum"].get<double>()) fail("above maximum");
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>()) {
      fail("not above exclusive minimum");
    }
  }
  if (doc.is_array()) {
    if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>()) {
      fail("too few items");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < doc.size(); ++i) {
        eval(doc[i], schema["items"], file, where + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>())) fail("missing " + key.dump());
      }
    }
    const Json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    for (const auto& [key, value] : doc.items()) {
      if (props && props->contains(key)) {
        eval(value, (*props)[key], file, where + "." + key, errors);
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false) {
        fail("unexpected property \"" + key + "\"");
      }
    }
  }
}

}  // namespace schema
