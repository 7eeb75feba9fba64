// SPDX-License-Identifier: Apache-2.0
#include "gpursm/schema.hpp"

namespace gpursm {
namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>()));
  }
  return false;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& v, const json& s, const std::string& path) {
    if (s.is_boolean()) {
      if (!s.get<bool>()) errors.push_back(path + ": no value allowed here");
      return;
    }
    if (auto it = s.find("$ref"); it != s.end()) {
      const auto& target = resolve(it->get<std::string>(), path);
      if (!target.is_null()) check(v, target, path);
    }
    if (auto it = s.find("type"); it != s.end()) {
      bool ok = false;
      if (it->is_string()) ok = has_type(v, it->get<std::string>());
      for (const auto& t : it->is_array() ? *it : json::array()) ok = ok || has_type(v, t.get<std::string>());
      if (!ok) {
        errors.push_back(path + ": expected type " + it->dump() + ", got " + v.type_name());
        return;
      }
    }
    if (auto it = s.find("enum"); it != s.end()) {
      bool found = false;
      for (const auto& e : *it) found = found || e == v;
      if (!found) errors.push_back(path + ": value " + v.dump() + " not in " + it->dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (auto it = s.find("minimum"); it != s.end() && x < it->get<double>())
        errors.push_back(path + ": " + v.dump() + " below minimum " + it->dump());
      if (auto it = s.find("maximum"); it != s.end() && x > it->get<double>())
        errors.push_back(path + ": " + v.dump() + " above maximum " + it->dump());
    }
    if (auto it = s.find("anyOf"); it != s.end()) {
      bool any = false;
      for (const auto& sub : *it) {
        Validator probe(root_);
        probe.check(v, sub, path);
        if (probe.errors.empty()) {
          any = true;
          break;
        }
      }
      if (!any) errors.push_back(path + ": matches no alternative of anyOf");
    }
    if (v.is_object()) check_object(v, s, path);
    if (v.is_array()) {
      if (auto it = s.find("minItems"); it != s.end() && v.size() < it->get<std::size_t>())
        errors.push_back(path + ": fewer than " + it->dump() + " items");
      if (auto it = s.find("items"); it != s.end())
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *it, path + "/" + std::to_string(i));
    }
  }

  std::vector<std::string> errors;

 private:
  void check_object(const json& v, const json& s, const std::string& path) {
    if (auto it = s.find("required"); it != s.end())
      for (const auto& key : *it)
        if (!v.contains(key.get<std::string>()))
          errors.push_back(path + ": missing required property '" + key.get<std::string>() + "'");
    const auto props = s.find("properties");
    const auto extra = s.find("additionalProperties");
    for (const auto& [key, value] : v.items()) {
      const std::string sub = path + "/" + key;
      if (props != s.end() && props->contains(key)) {
        check(value, (*props)[key], sub);
      } else if (extra != s.end()) {
        check(value, *extra, sub);
      }
    }
  }

  const json& resolve(const std::string& ref, const std::string& path) {
    static const json kNull;
    if (ref.rfind("#/", 0) != 0) {
      errors.push_back(path + ": unsupported $ref '" + ref + "'");
      return kNull;
    }
    const json::json_pointer ptr(ref.substr(1));
    if (!root_.contains(ptr)) {
      errors.push_back(path + ": dangling $ref '" + ref + "'");
      return kNull;
    }
    return root_.at(ptr);
  }

  const json& root_;
};

}  // namespace

std::vector<std::string> validate_json(const json& instance, const json& schema) {
  Validator v(schema);
  v.check(instance, schema, "");
  return v.errors;
}

}  // namespace gpursm
