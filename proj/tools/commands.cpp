#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "ldem/error.hpp"
#include "ldem/log.hpp"
#include "ldem/remesh.hpp"

namespace ldem::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
    Clock::time_point start = Clock::now();
    std::optional<double> seconds(bool record) const {
        if (!record) return std::nullopt;
        return std::chrono::duration<double>(Clock::now() - start).count();
    }
};

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) { std::filesystem::create_directories(dir_); }

    std::string path(const std::string& name) {
        const std::string p = (dir_ / name).string();
        files_.push_back(p);
        return p;
    }
    void text(const std::string& name, const std::string& body) { write_text_file(path(name), body); }
    std::vector<std::string> files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

std::vector<double> population_on_faces(const RunConfig& c, const std::string& generator, const TriGrid2D& grid) {
    return make_population(generator, grid, c.field).values;
}

std::string diffusion_method_name(const std::string& preset) {
    return preset == "default" ? "diffusion" : "diffusion_" + preset;
}

std::vector<Vec2> planar(const ObjMesh& mesh, const std::string& name) {
    std::vector<Vec2> out;
    out.reserve(mesh.vertices.size());
    bool lifted = false;
    for (const auto& v : mesh.vertices) {
        out.push_back({v[0], v[1]});
        lifted = lifted || v[2] != 0.0;
    }
    if (lifted) warn(name + " has non-zero z coordinates; they are ignored");
    return out;
}

}  // namespace

SurfaceMesh load_surface(const std::string& input) {
    if (input == "builtin:hemisphere") return hemisphere_mesh(41);
    if (input == "builtin:peaks") return peaks_mesh(41);
    if (input.rfind("builtin:", 0) == 0) throw InputError("unknown builtin surface '" + input + "'");
    ObjMesh obj = read_obj_file(input);
    return make_surface_mesh(std::move(obj.vertices), std::move(obj.faces));
}

CommandOutput cmd_map2d(const RunConfig& c) {
    const TriGrid2D grid = make_grid_2d(c.pipeline.d_dense);
    const auto population = population_on_faces(c, c.generator, grid);
    const Timer timer;
    const Pipeline2DResult r = run_pipeline_2d(population, c.pipeline);
    const auto runtime = timer.seconds(c.record_runtime);

    CommandOutput out;
    out.rows = {{c.label(), "ldem_coarse", r.coarse_report, std::nullopt}, {c.label(), "ldem", r.report, runtime}};
    OutputDir dir(c.output_dir);
    write_obj_file(dir.path("coarse.obj"), std::span<const Vec2>(r.coarse_grid.vertices), r.coarse_grid.faces);
    write_obj_file(dir.path("dense.obj"), std::span<const Vec2>(r.dense_grid.vertices), r.dense_grid.faces);
    dir.text("summary.csv", summary_csv(out.rows));
    dir.text("faces.csv", element_csv(r.report, population, face_areas(r.dense_grid.vertices, r.dense_grid.faces)));
    dir.text("histogram.svg", histogram_svg(r.report.histogram, c.label() + ": density"));
    dir.text("map.svg", map_svg(r.dense_grid.vertices, r.dense_grid.faces, population, c.label() + ": LDEM map"));
    if (c.save_checkpoints) {
        save_checkpoint_file(dir.path("coarse.ldem"), r.coarse_model);
        save_checkpoint_file(dir.path("dense.ldem"), r.dense_model);
    }
    out.files = dir.files();
    return out;
}

CommandOutput cmd_map3d(const RunConfig& c) {
    const TetGrid3D grid = make_grid_3d(c.pipeline3d.d_coarse);
    const auto population = make_population(c.generator, grid, c.field).values;
    const Timer timer;
    const Pipeline3DResult r = run_pipeline_3d(population, c.pipeline3d);
    const auto runtime = timer.seconds(c.record_runtime);
    const QualityReport initial = quality_report_3d(grid.reference_vertices, grid.reference_vertices, grid.cells,
                                                    population, c.pipeline3d.histogram_bins,
                                                    c.pipeline3d.std_convention);

    CommandOutput out;
    out.rows = {{c.label(), "identity", initial, std::nullopt}, {c.label(), "ldem", r.report, runtime}};
    OutputDir dir(c.output_dir);
    write_obj_file(dir.path("boundary.obj"), std::span<const Vec3>(r.grid.vertices), boundary_faces(r.grid.cells));
    write_element_file(dir.path("elements.txt"), r.grid.cells);
    dir.text("summary.csv", summary_csv(out.rows));
    dir.text("cells.csv", element_csv(r.report, population, cell_volumes(r.grid.vertices, r.grid.cells)));
    dir.text("histogram.svg", histogram_svg(r.report.histogram, c.label() + ": density"));
    if (c.save_checkpoints) save_checkpoint_file(dir.path("model.ldem"), r.model);
    out.files = dir.files();
    return out;
}

CommandOutput cmd_baseline(const RunConfig& c) {
    const TriGrid2D grid = make_grid_2d(c.pipeline.d_dense);
    const auto population = population_on_faces(c, c.generator, grid);
    const Timer timer;
    const DiffusionResult r = run_diffusion(grid, population, c.diffusion);
    const auto runtime = timer.seconds(c.record_runtime);
    if (!r.converged)
        warn("diffusion stopped after " + std::to_string(r.iterations) + " iterations without reaching the tolerance");

    CommandOutput out;
    out.rows = {{c.label(), diffusion_method_name(c.baseline_preset), r.report, runtime}};
    OutputDir dir(c.output_dir);
    write_obj_file(dir.path("dense.obj"), std::span<const Vec2>(r.positions), grid.faces);
    dir.text("summary.csv", summary_csv(out.rows));
    dir.text("faces.csv", element_csv(r.report, population, face_areas(r.positions, grid.faces)));
    dir.text("histogram.svg", histogram_svg(r.report.histogram, c.label() + ": density"));
    dir.text("map.svg", map_svg(r.positions, grid.faces, population, c.label() + ": diffusion map"));
    out.files = dir.files();
    return out;
}

CommandOutput cmd_compare(const RunConfig& c) {
    struct Task {
        std::string generator, method;
        SummaryRow row;
    };
    std::vector<Task> tasks;
    for (const auto& g : c.compare_generators)
        for (const auto& m : c.compare_methods) tasks.push_back({g, m, {}});

    auto run = [&](Task& t) {
        RunConfig local = c;
        local.generator = t.generator;
        const std::string label = c.compare_generators.size() == 1 ? c.label() : t.generator;
        const TriGrid2D grid = make_grid_2d(c.pipeline.d_dense);
        const auto population = population_on_faces(c, t.generator, grid);
        const Timer timer;
        std::optional<QualityReport> report;
        if (t.method == "ldem") {
            report = run_pipeline_2d(population, c.pipeline).report;
        } else {
            DiffusionConfig dc = t.method == "diffusion" ? c.diffusion
                                 : t.method == "diffusion_large_step" ? diffusion_preset("large_step")
                                                                      : diffusion_preset("reduced");
            dc.histogram_bins = c.pipeline.histogram_bins;
            try {
                report = run_diffusion(grid, population, dc).report;
            } catch (const DivergenceError& e) {
                warn(label + "/" + t.method + ": " + e.what());
            }
        }
        t.row = {label, t.method, std::move(report), timer.seconds(c.record_runtime)};
    };

    const unsigned workers = std::min<unsigned>(worker_threads(), static_cast<unsigned>(tasks.size()));
    if (workers <= 1) {
        for (auto& t : tasks) run(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < tasks.size(); i = next++) {
                    try {
                        run(tasks[i]);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    CommandOutput out;
    for (auto& t : tasks) out.rows.push_back(std::move(t.row));
    OutputDir dir(c.output_dir);
    dir.text("summary.csv", summary_csv(out.rows));
    out.files = dir.files();
    return out;
}

RemeshResult run_remesh(const RunConfig& c) {
    const SurfaceMesh mesh = load_surface(c.remesh_input);
    RemeshConfig rc;
    rc.resolution = c.remesh_resolution;
    rc.ldem = c.pipeline;
    if (!c.boundary_set) rc.ldem.boundary = BoundaryMode::slide;
    if (!c.population_csv.empty())
        return remesh_surface(mesh, read_population_csv(c.population_csv, mesh.faces.size()), rc);
    const std::string gen = c.population_generator.empty() ? "uniform" : c.population_generator;
    const FieldParams field = c.field;
    return remesh_surface(mesh, [gen, field](const Vec2& p) { return evaluate_2d(gen, p, field); }, rc);
}

CommandOutput cmd_remesh(const RunConfig& c) {
    const SurfaceMesh mesh = load_surface(c.remesh_input);
    const Timer timer;
    const RemeshResult r = run_remesh(c);
    const auto runtime = timer.seconds(c.record_runtime);

    const TriGrid2D out_grid = make_grid_2d(c.remesh_resolution);
    const std::vector<double> ones(out_grid.faces.size(), 1.0);
    QualityReport pullback =
        quality_report_2d(out_grid.reference_vertices, r.parameter, out_grid.faces, ones, c.pipeline.histogram_bins);

    CommandOutput out;
    out.rows = {{c.label(), "ldem", r.ldem.report, std::nullopt}, {c.label(), "remesh", pullback, runtime}};
    OutputDir dir(c.output_dir);
    write_obj_file(dir.path("remeshed.obj"), std::span<const Vec3>(r.mesh.vertices), r.mesh.faces);
    write_obj_file(dir.path("parameter.obj"), std::span<const Vec2>(r.tutte), mesh.faces);
    write_obj_file(dir.path("ldem_dense.obj"), std::span<const Vec2>(r.ldem.dense_grid.vertices),
                   r.ldem.dense_grid.faces);
    dir.text("summary.csv", summary_csv(out.rows));
    std::vector<double> area(out_grid.faces.size());
    for (std::size_t f = 0; f < area.size(); ++f) {
        const auto& t = r.mesh.faces[f];
        area[f] = triangle_area_3d(r.mesh.vertices[static_cast<std::size_t>(t[0])],
                                   r.mesh.vertices[static_cast<std::size_t>(t[1])],
                                   r.mesh.vertices[static_cast<std::size_t>(t[2])]);
    }
    dir.text("map.svg", map_svg(r.parameter, out_grid.faces, area, c.label() + ": output triangle area"));
    out.files = dir.files();
    return out;
}

CommandOutput cmd_metrics(const RunConfig& c) {
    if (c.metrics_reference.empty() || c.metrics_deformed.empty())
        throw InputError("metrics needs --reference and --deformed meshes");
    const ObjMesh ref = read_obj_file(c.metrics_reference);
    const ObjMesh def = read_obj_file(c.metrics_deformed);
    if (ref.vertices.size() != def.vertices.size() || ref.faces != def.faces)
        throw InputError("reference and deformed meshes must share vertices and faces");
    const auto ref2 = planar(ref, c.metrics_reference);
    const auto def2 = planar(def, c.metrics_deformed);
    const std::vector<double> population = c.metrics_populations.empty()
                                               ? std::vector<double>(ref.faces.size(), 1.0)
                                               : read_population_csv(c.metrics_populations, ref.faces.size());
    const QualityReport report =
        quality_report_2d(ref2, def2, ref.faces, population, c.pipeline.histogram_bins, c.pipeline.std_convention);

    CommandOutput out;
    out.rows = {{c.label(), "metrics", report, std::nullopt}};
    OutputDir dir(c.output_dir);
    dir.text("summary.csv", summary_csv(out.rows));
    dir.text("faces.csv", element_csv(report, population, face_areas(def2, ref.faces)));
    dir.text("histogram.svg", histogram_svg(report.histogram, c.label() + ": density"));
    out.files = dir.files();
    return out;
}

CommandOutput run_command(const RunConfig& c) {
    if (c.mode == "map2d") return cmd_map2d(c);
    if (c.mode == "map3d") return cmd_map3d(c);
    if (c.mode == "baseline") return cmd_baseline(c);
    if (c.mode == "compare") return cmd_compare(c);
    if (c.mode == "remesh") return cmd_remesh(c);
    if (c.mode == "metrics") return cmd_metrics(c);
    throw InputError("unknown mode '" + c.mode + "'");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Learning-based density-equalizing maps"};
    app.require_subcommand(1);

    struct Flags {
        std::string config, out, generator, preset, input, reference, deformed, populations, population_generator;
        std::uint64_t seed = 0;
        int d_coarse = 0, d_dense = 0, resolution = 0;
        bool record_runtime = false;
    } f;
    const std::vector<std::pair<std::string, std::string>> modes = {
        {"map2d", "coarse-to-dense LDEM on a 2D population"},
        {"map3d", "coarse-only LDEM on a 3D population"},
        {"baseline", "diffusion-based reference method"},
        {"compare", "LDEM and diffusion side by side"},
        {"remesh", "surface remeshing through Tutte + LDEM"},
        {"metrics", "quality report for a stored mesh pair"}};
    for (const auto& [name, help] : modes) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", f.config, "JSON run configuration");
        sub->add_option("--seed", f.seed, "random seed");
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--generator", f.generator, "population generator");
        sub->add_option("--d-coarse", f.d_coarse, "coarse grid resolution");
        sub->add_option("--d-dense", f.d_dense, "dense grid resolution");
        sub->add_flag("--record-runtime", f.record_runtime, "write wall-clock seconds to the summary");
        if (name == "baseline") sub->add_option("--preset", f.preset, "default | large_step | reduced");
        if (name == "remesh") {
            sub->add_option("--input", f.input, "OBJ surface or builtin:hemisphere / builtin:peaks");
            sub->add_option("--resolution", f.resolution, "output grid resolution");
            sub->add_option("--populations", f.populations, "per-face population CSV");
            sub->add_option("--population-generator", f.population_generator, "generator over the parameter square");
        }
        if (name == "metrics") {
            sub->add_option("--reference", f.reference, "reference OBJ");
            sub->add_option("--deformed", f.deformed, "deformed OBJ");
            sub->add_option("--populations", f.populations, "per-face population CSV");
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const std::string& flag) { return sub->get_option_no_throw(flag) && sub->count(flag) > 0; };
    try {
        json doc = given("--config") ? load_config_file(f.config) : json::object();
        const std::string mode = sub->get_name();
        doc["mode"] = mode;
        if (given("--seed")) set_key(doc, "/seed", f.seed);
        if (given("--out")) set_key(doc, "/output_dir", f.out);
        if (given("--generator")) set_key(doc, "/generator", f.generator);
        if (given("--d-coarse")) set_key(doc, "/d_coarse", f.d_coarse);
        if (given("--d-dense")) set_key(doc, "/d_dense", f.d_dense);
        if (given("--record-runtime")) set_key(doc, "/record_runtime", f.record_runtime);
        if (given("--preset")) set_key(doc, "/baseline/preset", f.preset);
        if (given("--input")) set_key(doc, "/remesh/input", f.input);
        if (given("--resolution")) set_key(doc, "/remesh/resolution", f.resolution);
        if (given("--population-generator")) set_key(doc, "/remesh/population_generator", f.population_generator);
        if (given("--populations"))
            set_key(doc, mode == "remesh" ? "/remesh/population_csv" : "/metrics/populations", f.populations);
        if (given("--reference")) set_key(doc, "/metrics/reference", f.reference);
        if (given("--deformed")) set_key(doc, "/metrics/deformed", f.deformed);

        const RunConfig config = parse_run_config(doc);
        const CommandOutput out = run_command(config);
        std::cout << summary_csv(out.rows);
        for (const auto& file : out.files) std::cerr << "wrote " << file << '\n';
        return 0;
    } catch (const SchemaError& e) {
        std::cerr << "error: invalid configuration at " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace ldem::cli
