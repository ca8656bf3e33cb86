#include "pentestxx/common/json_schema.hpp"

#include <regex>

namespace pentestxx {

namespace {

bool type_matches(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

void check(const nlohmann::json& v, const nlohmann::json& schema, const std::string& where,
           std::vector<std::string>& errors) {
  if (!schema.is_object()) return;

  if (auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    if (t->is_string()) {
      ok = type_matches(v, t->get<std::string>());
    } else if (t->is_array()) {
      for (const auto& alt : *t) ok = ok || type_matches(v, alt.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + t->dump() + ", got " + v.type_name());
      return;
    }
  }
  if (auto c = schema.find("const"); c != schema.end() && v != *c) {
    errors.push_back(where + ": expected constant " + c->dump());
  }
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& option : *e) found = found || option == v;
    if (!found) errors.push_back(where + ": value " + v.dump() + " not in enum");
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (auto m = schema.find("minLength"); m != schema.end() && s.size() < m->get<std::size_t>()) {
      errors.push_back(where + ": string shorter than " + m->dump());
    }
    if (auto p = schema.find("pattern"); p != schema.end() && !std::regex_search(s, std::regex(p->get<std::string>()))) {
      errors.push_back(where + ": string does not match pattern " + p->dump());
    }
  }
  if (v.is_number()) {
    if (auto m = schema.find("minimum"); m != schema.end() && v.get<double>() < m->get<double>()) {
      errors.push_back(where + ": below minimum " + m->dump());
    }
    if (auto m = schema.find("maximum"); m != schema.end() && v.get<double>() > m->get<double>()) {
      errors.push_back(where + ": above maximum " + m->dump());
    }
  }
  if (v.is_array()) {
    if (auto m = schema.find("minItems"); m != schema.end() && v.size() < m->get<std::size_t>()) {
      errors.push_back(where + ": fewer than " + m->dump() + " items");
    }
    if (auto m = schema.find("maxItems"); m != schema.end() && v.size() > m->get<std::size_t>()) {
      errors.push_back(where + ": more than " + m->dump() + " items");
    }
    if (auto items = schema.find("items"); items != schema.end()) {
      if (items->is_array()) {
        for (std::size_t i = 0; i < v.size() && i < items->size(); ++i) {
          check(v[i], (*items)[i], where + "[" + std::to_string(i) + "]", errors);
        }
      } else {
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *items, where + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
  if (v.is_object()) {
    if (auto req = schema.find("required"); req != schema.end()) {
      for (const auto& key : *req) {
        if (!v.contains(key.get<std::string>())) errors.push_back(where + ": missing required property " + key.dump());
      }
    }
    const auto props = schema.find("properties");
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (props != schema.end() && props->contains(it.key())) {
        check(it.value(), (*props)[it.key()], where + "." + it.key(), errors);
      } else if (auto ap = schema.find("additionalProperties"); ap != schema.end()) {
        if (ap->is_boolean() && !ap->get<bool>()) {
          errors.push_back(where + ": unexpected property \"" + it.key() + "\"");
        } else if (ap->is_object()) {
          check(it.value(), *ap, where + "." + it.key(), errors);
        }
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate_json(const nlohmann::json& doc, const nlohmann::json& schema) {
  std::vector<std::string> errors;
  check(doc, schema, "$", errors);
  return errors;
}

}  // namespace pentestxx
