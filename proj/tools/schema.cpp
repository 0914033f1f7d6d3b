#include "schema.hpp"

#include <cmath>
#include <sstream>

#include "ldem/error.hpp"
#include "schema_text.hpp"

namespace ldem::cli {

using nlohmann::json;

namespace {

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

std::string type_of(const json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_null()) return "null";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    return "number";
}

bool matches_type(const json& v, const std::string& type) {
    if (type == "number") return v.is_number();
    if (type == "integer") {
        if (v.is_number_integer() || v.is_number_unsigned()) return true;
        if (!v.is_number_float()) return false;
        const double d = v.get<double>();
        return std::isfinite(d) && std::floor(d) == d;
    }
    return type_of(v) == type;
}

std::string show(const json& v) {
    std::string s = v.dump();
    return s.size() > 40 ? s.substr(0, 37) + "..." : s;
}

}  // namespace

SchemaValidator::SchemaValidator(json schema) : root_(std::move(schema)) {}

void SchemaValidator::validate(const json& document) const { check(root_, document, ""); }

const json& SchemaValidator::resolve(const json& schema) const {
    const json* s = &schema;
    for (int depth = 0; s->is_object() && s->contains("$ref"); ++depth) {
        if (depth > 32) throw InputError("schema $ref chain too deep");
        const std::string ref = (*s)["$ref"].get<std::string>();
        if (ref.empty() || ref[0] != '#') throw InputError("only local $ref is supported: " + ref);
        s = &root_.at(json::json_pointer(ref.substr(1)));
    }
    return *s;
}

void SchemaValidator::check(const json& schema_in, const json& value, const std::string& pointer) const {
    const json& schema = resolve(schema_in);
    const std::string where = pointer.empty() ? "/" : pointer;
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        if (!matches_type(value, type))
            throw SchemaError(where, "expected " + type + ", got " + type_of(value) + " " + show(value));
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& option : schema["enum"]) found = found || option == value;
        if (!found) throw SchemaError(where, "value " + show(value) + " is not one of " + schema["enum"].dump());
    }
    if (value.is_number()) {
        const double x = value.get<double>();
        if (schema.contains("minimum") && x < schema["minimum"].get<double>())
            throw SchemaError(where, "value " + show(value) + " is below the minimum " + schema["minimum"].dump());
        if (schema.contains("maximum") && x > schema["maximum"].get<double>())
            throw SchemaError(where, "value " + show(value) + " is above the maximum " + schema["maximum"].dump());
        if (schema.contains("exclusiveMinimum") && !(x > schema["exclusiveMinimum"].get<double>()))
            throw SchemaError(where, "value " + show(value) + " must be greater than " + schema["exclusiveMinimum"].dump());
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    throw SchemaError(pointer + "/" + escape_token(key.get<std::string>()), "required key is missing");
        const json empty = json::object();
        const json& props = schema.contains("properties") ? schema["properties"] : empty;
        const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
        for (const auto& [key, child] : value.items()) {
            const std::string child_ptr = pointer + "/" + escape_token(key);
            if (props.contains(key)) check(props[key], child, child_ptr);
            else if (closed) throw SchemaError(child_ptr, "unknown key");
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>())
            throw SchemaError(where, "expected at least " + schema["minItems"].dump() + " items");
        if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>())
            throw SchemaError(where, "expected at most " + schema["maxItems"].dump() + " items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < value.size(); ++i) check(schema["items"], value[i], pointer + "/" + std::to_string(i));
    }
}

const json& run_config_schema() {
    static const json schema = json::parse(schema_text);
    return schema;
}

}  // namespace ldem::cli
