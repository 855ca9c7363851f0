#pragma once

// Minimal structural validator for the schema subset the shipped schemas
// use: type, required, properties, items, enum. Test-only; include after
// doctest.h (load_schema asserts through REQUIRE).

#include <fstream>
#include <string>

#include <json.hpp>

namespace mini_schema {

using nlohmann::json;

inline bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

inline bool validate(const json& value, const json& schema, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (schema.contains("type") && !type_matches(value, schema["type"].get<std::string>()))
        return fail("expected type " + schema["type"].get<std::string>() + ", got " + value.dump());
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& v : schema["enum"])
            if (v == value) hit = true;
        if (!hit) return fail("value " + value.dump() + " not in enum");
    }
    if (schema.contains("required")) {
        for (const auto& key : schema["required"])
            if (!value.contains(key.get<std::string>()))
                return fail("missing required key " + key.get<std::string>());
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (!value.contains(key)) continue;
            std::string inner;
            if (!validate(value[key], sub, &inner)) return fail(key + ": " + inner);
        }
    }
    if (schema.contains("items") && value.is_array()) {
        for (const auto& item : value) {
            std::string inner;
            if (!validate(item, schema["items"], &inner)) return fail("item: " + inner);
        }
    }
    return true;
}

inline json load_schema(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return json::parse(in);
}

}  // namespace mini_schema
