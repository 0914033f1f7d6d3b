#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldem/baseline.hpp"
#include "ldem/fields.hpp"
#include "ldem/pipeline.hpp"

namespace ldem::cli {

struct RunConfig {
    std::string mode = "map2d";
    std::string case_name;  // defaults to the generator name
    std::string generator;  // defaults per mode
    FieldParams field;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    Pipeline2DConfig pipeline;
    bool boundary_set = false;  // remesh defaults to sliding boundaries otherwise
    Pipeline3DConfig pipeline3d;
    bool record_runtime = false;
    bool save_checkpoints = false;
    std::string baseline_preset = "default";
    DiffusionConfig diffusion = diffusion_preset("default");
    std::vector<std::string> compare_generators;
    std::vector<std::string> compare_methods = {"ldem", "diffusion", "diffusion_large_step", "diffusion_reduced"};
    std::string remesh_input = "builtin:hemisphere";
    int remesh_resolution = 30;
    std::string population_csv;
    std::string population_generator;
    std::string metrics_reference;
    std::string metrics_deformed;
    std::string metrics_populations;

    std::string label() const { return case_name.empty() ? generator : case_name; }
};

// Reads a JSON config; relative path-valued keys are resolved against the
// directory of the file.
nlohmann::json load_config_file(const std::string& path);

// Validates against the run-configuration schema (throws SchemaError) and
// fills a RunConfig, starting from the documented defaults.
RunConfig parse_run_config(const nlohmann::json& document);

// Sets `value` at a JSON pointer, creating intermediate objects.
void set_key(nlohmann::json& document, const std::string& pointer, nlohmann::json value);

}  // namespace ldem::cli
