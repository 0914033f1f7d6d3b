#include "run_config.hpp"

#include <filesystem>
#include <fstream>

#include "ldem/error.hpp"
#include "schema.hpp"

namespace ldem::cli {

using nlohmann::json;

namespace {

const char* const path_keys[] = {"/generator_params/mask", "/remesh/input", "/remesh/population_csv",
                                 "/metrics/reference",     "/metrics/deformed", "/metrics/populations"};

Rect parse_rect(const json& v, const std::string& pointer) {
    Rect r{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
    if (r.x_min > r.x_max || r.y_min > r.y_max) throw SchemaError(pointer, "rectangle must be [x_min, x_max, y_min, y_max]");
    return r;
}

void read_schedule(const json& s, TrainingSchedule& out) {
    out.init_learning_rate = s.value("init_lr", out.init_learning_rate);
    out.init_epochs = s.value("init_epochs", out.init_epochs);
    out.train_learning_rate = s.value("train_lr", out.train_learning_rate);
    out.max_epochs = s.value("max_epochs", out.max_epochs);
    out.patience = s.value("patience", out.patience);
    out.min_delta = s.value("min_delta", out.min_delta);
    out.warmup = s.value("warmup", out.warmup);
    out.clip = s.value("clip", out.clip);
}

}  // namespace

void set_key(json& document, const std::string& pointer, json value) {
    document[json::json_pointer(pointer)] = std::move(value);
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("/", "config must be a JSON object");
    const auto base = std::filesystem::path(path).parent_path();
    for (const char* key : path_keys) {
        const json::json_pointer ptr(key);
        if (!doc.contains(ptr) || !doc[ptr].is_string()) continue;
        const std::string value = doc[ptr].get<std::string>();
        if (value.rfind("builtin:", 0) == 0 || std::filesystem::path(value).is_absolute()) continue;
        doc[ptr] = (base / value).lexically_normal().string();
    }
    return doc;
}

RunConfig parse_run_config(const json& doc) {
    SchemaValidator(run_config_schema()).validate(doc);
    RunConfig c;
    c.mode = doc.value("mode", c.mode);
    c.case_name = doc.value("case", std::string());
    c.generator = doc.value("generator", std::string(c.mode == "map3d" ? "basic_sinusoidal_3d" : "basic_sinusoidal"));
    if (c.mode == "map3d" ? !is_generator_3d(c.generator) : !is_generator_2d(c.generator))
        throw SchemaError("/generator", "unknown generator '" + c.generator + "' for mode " + c.mode);
    c.seed = doc.value("seed", c.seed);
    c.output_dir = doc.value("output_dir", c.output_dir);
    c.record_runtime = doc.value("record_runtime", false);
    c.save_checkpoints = doc.value("save_checkpoints", false);

    if (doc.contains("generator_params")) {
        const json& g = doc["generator_params"];
        FieldParams& f = c.field;
        f.ring_radius = g.value("ring_radius", f.ring_radius);
        f.ring_thickness = g.value("ring_thickness", f.ring_thickness);
        if (g.contains("peak_rects")) {
            f.peak_rects.clear();
            for (std::size_t i = 0; i < g["peak_rects"].size(); ++i)
                f.peak_rects.push_back(parse_rect(g["peak_rects"][i], "/generator_params/peak_rects/" + std::to_string(i)));
        }
        f.peak_value = g.value("peak_value", f.peak_value);
        if (g.contains("extreme_rect")) f.extreme_rect = parse_rect(g["extreme_rect"], "/generator_params/extreme_rect");
        f.extreme_high = g.value("extreme_high", f.extreme_high);
        f.extreme_low = g.value("extreme_low", f.extreme_low);
        if (g.contains("mask")) f.mask = read_pgm_file(g["mask"].get<std::string>());
        f.pattern_base = g.value("pattern_base", f.pattern_base);
        f.pattern_delta = g.value("pattern_delta", f.pattern_delta);
        if (g.contains("shell_center"))
            f.shell_center = {g["shell_center"][0].get<double>(), g["shell_center"][1].get<double>(),
                              g["shell_center"][2].get<double>()};
        f.shell_radius = g.value("shell_radius", f.shell_radius);
        f.shell_thickness = g.value("shell_thickness", f.shell_thickness);
        f.uniform_value = g.value("uniform_value", f.uniform_value);
    }

    Pipeline2DConfig& p = c.pipeline;
    p.seed = c.seed;
    p.d_coarse = doc.value("d_coarse", p.d_coarse);
    p.d_dense = doc.value("d_dense", p.d_dense);
    if (c.mode != "map3d" && c.mode != "metrics" && c.mode != "baseline" && p.d_coarse >= p.d_dense)
        throw SchemaError("/d_coarse", "d_coarse must be below d_dense");
    p.histogram_bins = doc.value("histogram_bins", p.histogram_bins);
    if (doc.contains("boundary")) {
        p.boundary = parse_boundary_mode(doc["boundary"].get<std::string>());
        c.boundary_set = true;
    }
    if (doc.contains("loss")) {
        const json& l = doc["loss"];
        if (l.contains("density_coarse")) p.coarse_density_weight = l["density_coarse"].get<double>();
        if (l.contains("density_dense")) p.dense_density_weight = l["density_dense"].get<double>();
        p.slope_weight = l.value("slope", p.slope_weight);
        p.distance_weight = l.value("distance", p.distance_weight);
        if (l.value("std_convention", std::string("population")) == "sample") p.std_convention = ad::StdConvention::sample;
    }
    if (doc.contains("coarse_schedule")) read_schedule(doc["coarse_schedule"], p.coarse);
    if (doc.contains("dense_schedule")) read_schedule(doc["dense_schedule"], p.dense);
    if (doc.contains("model")) {
        p.bottleneck = doc["model"].value("bottleneck", p.bottleneck);
        p.kernel = doc["model"].value("kernel", p.kernel);
    }

    Pipeline3DConfig& q = c.pipeline3d;
    q.seed = c.seed;
    q.d_coarse = p.d_coarse;
    q.histogram_bins = p.histogram_bins;
    q.std_convention = p.std_convention;
    q.bottleneck = p.bottleneck;
    q.kernel = p.kernel;
    if (doc.contains("map3d")) {
        const json& m = doc["map3d"];
        if (m.contains("schedule")) read_schedule(m["schedule"], q.schedule);
        q.density_weight = m.value("density_weight", q.density_weight);
        q.distance_weight = m.value("distance_weight", q.distance_weight);
    }

    if (doc.contains("baseline")) {
        const json& b = doc["baseline"];
        c.baseline_preset = b.value("preset", c.baseline_preset);
        c.diffusion = diffusion_preset(c.baseline_preset);
        c.diffusion.dt = b.value("dt", c.diffusion.dt);
        c.diffusion.step_factor = b.value("step_factor", c.diffusion.step_factor);
        c.diffusion.tolerance = b.value("tolerance", c.diffusion.tolerance);
        c.diffusion.max_iterations = b.value("max_iterations", c.diffusion.max_iterations);
        c.diffusion.raster = b.value("raster", c.diffusion.raster);
    }
    c.diffusion.histogram_bins = p.histogram_bins;

    if (doc.contains("compare")) {
        const json& cmp = doc["compare"];
        if (cmp.contains("generators")) {
            c.compare_generators = cmp["generators"].get<std::vector<std::string>>();
            for (std::size_t i = 0; i < c.compare_generators.size(); ++i)
                if (!is_generator_2d(c.compare_generators[i]))
                    throw SchemaError("/compare/generators/" + std::to_string(i),
                                      "unknown generator '" + c.compare_generators[i] + "'");
        }
        if (cmp.contains("methods")) c.compare_methods = cmp["methods"].get<std::vector<std::string>>();
    }
    if (c.compare_generators.empty()) c.compare_generators = {c.generator};

    if (doc.contains("remesh")) {
        const json& r = doc["remesh"];
        c.remesh_input = r.value("input", c.remesh_input);
        c.remesh_resolution = r.value("resolution", c.remesh_resolution);
        c.population_csv = r.value("population_csv", std::string());
        c.population_generator = r.value("population_generator", std::string());
        if (!c.population_generator.empty() && !is_generator_2d(c.population_generator))
            throw SchemaError("/remesh/population_generator", "unknown generator '" + c.population_generator + "'");
    }
    if (doc.contains("metrics")) {
        const json& m = doc["metrics"];
        c.metrics_reference = m.value("reference", std::string());
        c.metrics_deformed = m.value("deformed", std::string());
        c.metrics_populations = m.value("populations", std::string());
    }
    return c;
}

}  // namespace ldem::cli
