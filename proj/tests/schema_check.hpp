#pragma once

// Minimal JSON-Schema subset validator for the shipped schema files:
// handles type, required, properties, items and enum, which is all the
// schemas in schemas/ use.

#include <string>

#include <json.hpp>

namespace schema_check {

using nlohmann::json;

inline bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    return false;
}

inline bool validate(const json& value, const json& schema, std::string& err, const std::string& where = "$") {
    if (schema.contains("type") && !type_matches(value, schema.at("type").get<std::string>())) {
        err = where + ": expected type " + schema.at("type").get<std::string>();
        return false;
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& cand : schema.at("enum")) hit = hit || cand == value;
        if (!hit) {
            err = where + ": value not in enum";
            return false;
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema.at("required")) {
                if (!value.contains(key.get<std::string>())) {
                    err = where + ": missing required key " + key.get<std::string>();
                    return false;
                }
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema.at("properties").items()) {
                if (value.contains(key) && !validate(value.at(key), sub, err, where + "." + key)) return false;
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        int i = 0;
        for (const auto& item : value) {
            if (!validate(item, schema.at("items"), err, where + "[" + std::to_string(i) + "]")) return false;
            ++i;
        }
    }
    return true;
}

}  // namespace schema_check
