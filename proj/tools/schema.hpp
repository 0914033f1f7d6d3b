#pragma once

#include <string>

#include "json.hpp"

namespace ldem::cli {

// Validator for the JSON Schema subset the run configuration uses: type,
// properties, required, additionalProperties (boolean), enum, minimum,
// maximum, exclusiveMinimum, items, minItems, maxItems and local $ref.
class SchemaValidator {
public:
    explicit SchemaValidator(nlohmann::json schema);

    // Throws SchemaError carrying the JSON pointer of the first violation.
    void validate(const nlohmann::json& document) const;

private:
    void check(const nlohmann::json& schema, const nlohmann::json& value, const std::string& pointer) const;
    const nlohmann::json& resolve(const nlohmann::json& schema) const;

    nlohmann::json root_;
};

// The published run-configuration schema (config/run_config.schema.json).
const nlohmann::json& run_config_schema();

}  // namespace ldem::cli
