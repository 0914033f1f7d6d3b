#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "artifacts.hpp"
#include "doctest.h"
#include "ldem/error.hpp"
#include "ldem/fields.hpp"
#include "run_config.hpp"
#include "schema.hpp"

using namespace ldem;
using namespace ldem::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ldem_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_ldem(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string(LDEM_BINARY) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

// Small resolutions and short schedules so an end-to-end run takes a second.
json quick_map2d() {
    json sched = {{"init_epochs", 150}, {"max_epochs", 100}, {"warmup", 20}, {"patience", 50}};
    return {{"mode", "map2d"},        {"generator", "basic_sinusoidal"}, {"d_coarse", 6}, {"d_dense", 13},
            {"coarse_schedule", sched}, {"dense_schedule", {{"init_epochs", 150}, {"max_epochs", 40}}}};
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("schema validator subset") {
    const SchemaValidator v(json::parse(R"({
        "type": "object", "additionalProperties": false, "required": ["a"],
        "properties": {
            "a": {"type": "integer", "minimum": 2, "maximum": 5},
            "b": {"enum": ["x", "y"]},
            "c": {"type": "array", "items": {"$ref": "#/$defs/pos"}, "minItems": 1},
            "d": {"type": "number", "exclusiveMinimum": 0}
        },
        "$defs": {"pos": {"type": "number", "exclusiveMinimum": 0}}
    })"));
    CHECK_NOTHROW(v.validate(json::parse(R"({"a": 3, "b": "x", "c": [1.5], "d": 0.1})")));
    auto pointer_of = [&](const char* text) {
        try {
            v.validate(json::parse(text));
        } catch (const SchemaError& e) {
            return e.pointer();
        }
        return std::string("ok");
    };
    CHECK(pointer_of(R"({})") == "/a");  // missing required key
    CHECK(pointer_of(R"({"a": 1})") == "/a");
    CHECK(pointer_of(R"({"a": 6})") == "/a");
    CHECK(pointer_of(R"({"a": 2.5})") == "/a");
    CHECK(pointer_of(R"({"a": 3, "b": "z"})") == "/b");
    CHECK(pointer_of(R"({"a": 3, "c": [1, -1]})") == "/c/1");
    CHECK(pointer_of(R"({"a": 3, "c": []})") == "/c");
    CHECK(pointer_of(R"({"a": 3, "d": 0})") == "/d");
    CHECK(pointer_of(R"({"a": 3, "e": 1})") == "/e");
}

TEST_CASE("embedded schema equals the published file") {
    const json file = json::parse(slurp(fs::path(LDEM_SOURCE_DIR) / "config/run_config.schema.json"));
    CHECK(file == run_config_schema());
}

TEST_CASE("defaults and semantic checks") {
    const RunConfig c = parse_run_config(json::object());
    CHECK(c.mode == "map2d");
    CHECK(c.pipeline.d_coarse == 16);
    CHECK(c.pipeline.d_dense == 51);
    CHECK(c.pipeline.coarse.train_learning_rate == 3e-3);
    CHECK(c.pipeline.dense.max_epochs == 300);
    CHECK(c.pipeline.distance_weight == 10.0);
    CHECK(c.field.ring_radius == 0.25);
    CHECK(c.field.extreme_low == 0.5);

    auto pointer_of = [](const json& j) {
        try {
            parse_run_config(j);
        } catch (const SchemaError& e) {
            return e.pointer();
        }
        return std::string("ok");
    };
    CHECK(pointer_of({{"d_coarse", 1}}) == "/d_coarse");
    CHECK(pointer_of({{"generator", "nope"}}) == "/generator");
    CHECK(pointer_of({{"mode", "map3d"}, {"generator", "ring"}}) == "/generator");
    CHECK(pointer_of({{"unknown", 1}}) == "/unknown");
    CHECK(pointer_of({{"coarse_schedule", {{"init_lr", -1}}}}) == "/coarse_schedule/init_lr");
    CHECK(pointer_of({{"d_coarse", 40}, {"d_dense", 20}}) != "ok");
}

TEST_CASE("every shipped preset validates") {
    int count = 0;
    for (const auto& e : fs::directory_iterator(fs::path(LDEM_SOURCE_DIR) / "presets")) {
        CAPTURE(e.path().string());
        CHECK_NOTHROW(parse_run_config(load_config_file(e.path().string())));
        ++count;
    }
    CHECK(count >= 15);
    const RunConfig cu = parse_run_config(load_config_file(LDEM_SOURCE_DIR "/presets/cu_pattern.json"));
    CHECK(cu.field.mask == default_cu_mask());
}

TEST_CASE("set_key creates intermediate objects") {
    json j = json::object();
    set_key(j, "/baseline/preset", "reduced");
    set_key(j, "/seed", 7);
    CHECK(j["baseline"]["preset"] == "reduced");
    CHECK(j["seed"] == 7);
}

TEST_CASE("number formatting and summary CSV") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
    CHECK(format_number(std::nan("")) == "NA");
    const std::vector<SummaryRow> rows{{"case", "diffusion", std::nullopt, std::nullopt}};
    CHECK(summary_csv(rows) == std::string(summary_header) + "\ncase,diffusion,NA,NA,NA,NA,NA\n");
}

TEST_CASE("population CSV reader") {
    const fs::path dir = scratch("csv");
    std::ofstream(dir / "ok.csv") << "face,population\n1,2.5\n0,1.5\n";
    CHECK(read_population_csv((dir / "ok.csv").string(), 2) == std::vector<double>{1.5, 2.5});
    std::ofstream(dir / "dup.csv") << "0,1\n0,2\n";
    CHECK_THROWS_AS(read_population_csv((dir / "dup.csv").string(), 2), InputError);
    std::ofstream(dir / "missing.csv") << "0,1\n";
    CHECK_THROWS_AS(read_population_csv((dir / "missing.csv").string(), 2), InputError);
    CHECK_THROWS_AS(read_population_csv((dir / "nope.csv").string(), 2), InputError);
}

TEST_CASE("schema errors exit with code 2 and a pointer") {
    const fs::path dir = scratch("schema");
    const Run r = run_ldem("map2d --d-coarse 1 --out " + (dir / "o").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("/d_coarse") != std::string::npos);
    json bad = quick_map2d();
    bad["loss"] = {{"slope", -1}};
    const Run b = run_ldem("map2d --config " + write_config(dir, bad).string(), dir);
    CHECK(b.code == 2);
    CHECK(b.err.find("/loss/slope") != std::string::npos);
    CHECK(run_ldem("map2d --config " + (dir / "absent.json").string(), dir).code != 0);
}

TEST_CASE("map2d writes its artifacts and is reproducible") {
    const fs::path dir = scratch("map2d");
    const fs::path cfg = write_config(dir, quick_map2d());
    const Run a = run_ldem("map2d --config " + cfg.string() + " --seed 7 --out " + (dir / "a").string(), dir);
    REQUIRE(a.code == 0);
    for (const char* f : {"coarse.obj", "dense.obj", "summary.csv", "faces.csv", "histogram.svg", "map.svg"})
        CHECK_MESSAGE(fs::exists(dir / "a" / f), f);
    CHECK(a.out == slurp(dir / "a" / "summary.csv"));
    CHECK(a.out.rfind(summary_header, 0) == 0);
    CHECK(a.out.find(",ldem,") != std::string::npos);
    CHECK(a.out.find(",NA\n") != std::string::npos);

    const Run b = run_ldem("map2d --config " + cfg.string() + " --seed 7 --out " + (dir / "b").string(), dir);
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
    CHECK(slurp(dir / "a" / "dense.obj") == slurp(dir / "b" / "dense.obj"));

    const Run c = run_ldem("map2d --config " + cfg.string() + " --seed 8 --out " + (dir / "c").string(), dir);
    REQUIRE(c.code == 0);
    CHECK(slurp(dir / "a" / "dense.obj") != slurp(dir / "c" / "dense.obj"));

    const ObjMesh dense = read_obj_file((dir / "a" / "dense.obj").string());
    CHECK(dense.vertices.size() == 169);
    CHECK(dense.faces.size() == 288);

    const Run t = run_ldem("map2d --config " + cfg.string() + " --record-runtime --out " + (dir / "t").string(), dir);
    REQUIRE(t.code == 0);
    CHECK(t.out.find(",NA\n") != std::string::npos);  // the coarse row carries no runtime
    CHECK(t.out.find(",ldem,") != std::string::npos);
}

TEST_CASE("metrics command on identical meshes") {
    const fs::path dir = scratch("metrics");
    const auto g = make_grid_2d(6);
    write_obj_file((dir / "ref.obj").string(), std::span<const Vec2>(g.vertices), g.faces);
    const Run r = run_ldem("metrics --reference " + (dir / "ref.obj").string() + " --deformed " +
                               (dir / "ref.obj").string() + " --out " + (dir / "o").string(),
                           dir);
    REQUIRE(r.code == 0);
    CHECK(r.out.find(",metrics,0,0,") != std::string::npos);
    CHECK(r.out.find(",0,NA\n") != std::string::npos);
}

TEST_CASE("baseline command and unknown presets") {
    const fs::path dir = scratch("baseline");
    const Run r = run_ldem("baseline --generator basic_sinusoidal --d-dense 15 --out " + (dir / "o").string(), dir);
    REQUIRE(r.code == 0);
    CHECK(r.out.find(",diffusion,") != std::string::npos);
    CHECK(run_ldem("baseline --preset huge --out " + (dir / "p").string(), dir).code == 2);
}

}
