#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "ldem/error.hpp"
#include "ldem/fields.hpp"

using namespace ldem;

TEST_SUITE("fields") {

TEST_CASE("basic sinusoidal values") {
    CHECK(basic_sinusoidal_2d({0.25, 0.0}) == doctest::Approx(3.0));
    CHECK(basic_sinusoidal_2d({0.5, 0.37}) == doctest::Approx(2.0));
    CHECK(basic_sinusoidal_2d({0.75, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("complex sinusoidal values") {
    CHECK(complex_sinusoidal_2d({0.0, 1.0}) == doctest::Approx(2.0));
    CHECK(complex_sinusoidal_2d({std::log(1.5), 1.0}) == doctest::Approx(2.0));
    // long double evaluation of the formula at (0.3, 0.4)
    const long double pi = std::numbers::pi_v<long double>;
    const long double ref = 2.0L + std::sin(std::exp(0.3L) * 2.0L * pi) * std::cos(std::log(0.4L) * pi);
    CHECK(std::abs(complex_sinusoidal_2d({0.3, 0.4}) - static_cast<double>(ref)) < 1e-14);
    CHECK_THROWS_AS(complex_sinusoidal_2d({0.3, 0.0}), DomainError);
    CHECK_THROWS_AS(complex_sinusoidal_2d({0.3, -0.1}), DomainError);
}

TEST_CASE("ring values") {
    CHECK(ring_2d({0.75, 0.5}, 0.25, 0.05) == doctest::Approx(1.0));
    CHECK(ring_2d({0.5, 0.5}, 0.25, 0.05) == doctest::Approx(std::exp(-12.5)).epsilon(1e-12));
    CHECK(ring_2d({0.5, 0.8}, 0.25, 0.05) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("localized peaks use closed rectangles") {
    const std::vector<Rect> rects{{0.1, 0.3, 0.6, 0.9}};
    CHECK(localized_peaks_2d({0.2, 0.7}, 1.5, rects, 4.0) == 4.0);
    CHECK(localized_peaks_2d({0.1, 0.9}, 1.5, rects, 4.0) == 4.0);
    CHECK(localized_peaks_2d({0.31, 0.7}, 1.5, rects, 4.0) == 1.5);
    const FieldParams p;
    CHECK(evaluate_2d("localized_peaks", {0.5, 0.5}, p) == doctest::Approx(basic_sinusoidal_2d({0.5, 0.5})));
    CHECK(evaluate_2d("localized_peaks", {0.7, 0.2}, p) == 4.0);
}

TEST_CASE("blended quadrants values") {
    CHECK(blended_quadrants_2d({0.5, 0.5}) == doctest::Approx(2.625));
    CHECK(std::abs(blended_quadrants_2d({0.0, 1.0}) - 1.0) < 1e-8);
    CHECK(std::abs(blended_quadrants_2d({1.0, 1.0}) - 2.5) < 1e-8);
    CHECK(std::abs(blended_quadrants_2d({0.0, 0.0}) - 3.0) < 1e-8);
    CHECK(std::abs(blended_quadrants_2d({1.0, 0.0}) - 4.0) < 1e-8);
    CHECK(blend_step(0.5, 0.5, 0.02) == 0.5);
}

TEST_CASE("pattern mask") {
    BinaryMask m{2, 2, {1, 0, 0, 0}};  // top-left set
    CHECK(pattern_mask_2d({0.25, 0.75}, m, 1.0, 2.0) == 3.0);
    CHECK(pattern_mask_2d({0.75, 0.75}, m, 1.0, 2.0) == 1.0);
    CHECK(pattern_mask_2d({0.25, 0.25}, m, 1.0, 2.0) == 1.0);
    BinaryMask clear{3, 3, std::vector<std::uint8_t>(9, 0)};
    for (double x : {0.1, 0.5, 0.9}) CHECK(pattern_mask_2d({x, 1.0 - x}, clear, 1.5, 2.0) == 1.5);
}

TEST_CASE("PGM parsing") {
    std::stringstream p2("P2\n# comment\n3 2\n255\n0 255 0\n200 100 128\n");
    const BinaryMask m = read_pgm(p2);
    CHECK(m.width == 3);
    CHECK(m.height == 2);
    CHECK(m.bits == std::vector<std::uint8_t>{0, 1, 0, 1, 0, 1});

    std::stringstream p5;
    p5 << "P5 2 1 255\n" << static_cast<char>(10) << static_cast<char>(250);
    CHECK(read_pgm(p5).bits == std::vector<std::uint8_t>{0, 1});

    std::stringstream round;
    write_pgm(round, default_cu_mask());
    CHECK(read_pgm(round) == default_cu_mask());

    std::stringstream bad_magic("P3\n1 1\n255\n0\n");
    CHECK_THROWS_AS(read_pgm(bad_magic), InputError);
    std::stringstream truncated("P2\n2 2\n255\n0 0 0\n");
    CHECK_THROWS_AS(read_pgm(truncated), InputError);
}

TEST_CASE("shipped CU asset equals the built-in stencil") {
    CHECK(read_pgm_file(LDEM_SOURCE_DIR "/assets/cu_mask.pgm") == default_cu_mask());
}

TEST_CASE("CU stencil has both letters") {
    const BinaryMask m = default_cu_mask();
    CHECK(m.width == 64);
    CHECK(m.height == 64);
    long set = 0;
    for (auto b : m.bits) set += b;
    CHECK(set > 300);
    CHECK(set < 2000);
    CHECK_FALSE(m.at({0.5, 0.5}));  // gap between letters
}

TEST_CASE("extreme values") {
    const std::optional<Rect> r = Rect{0.3, 0.7, 0.4, 0.6};
    CHECK(extreme_2d({0.5, 0.5}, r, 10.0, 0.5) == 10.0);
    CHECK(extreme_2d({0.1, 0.5}, r, 10.0, 0.5) == 0.5);
    CHECK(extreme_2d({0.5, 0.5}, std::nullopt, 10.0, 0.5) == 0.5);
}

TEST_CASE("3D generator values") {
    CHECK(basic_sinusoidal_3d({0.5, 0.3, 0.8}) == doctest::Approx(1.2));
    CHECK(blended_octants_3d({0.5, 0.5, 0.5}) == doctest::Approx(4.5));
    CHECK(std::abs(blended_octants_3d({0.0, 0.0, 0.0}) - 1.0) < 1e-8);
    CHECK(std::abs(blended_octants_3d({1.0, 1.0, 1.0}) - 8.0) < 1e-8);
    CHECK(spherical_shell_3d({0.8, 0.5, 0.5}, {0.5, 0.5, 0.5}, 0.3, 0.07) == doctest::Approx(1.0));
    CHECK(complex_sinusoidal_3d({0.3, 0.0, 0.25}) > 0.0);
    CHECK_THROWS_AS(complex_sinusoidal_3d({0.3, -1.0, 0.25}), DomainError);
}

TEST_CASE("generators are positive and pure on experiment grids") {
    for (int n : {16, 51}) {
        const auto g = make_grid_2d(n);
        for (const auto& name : generator_names_2d()) {
            const auto a = make_population(name, g);
            const auto b = make_population(name, g);
            CHECK(a.values == b.values);
            CHECK(a.values.size() == g.faces.size());
            bool positive = true;
            for (double v : a.values) positive = positive && v > 0.0;
            CHECK_MESSAGE(positive, name);
        }
    }
    const auto g3 = make_grid_3d(16);
    for (const auto& name : generator_names_3d()) {
        const auto a = make_population(name, g3);
        bool positive = true;
        for (double v : a.values) positive = positive && v > 0.0;
        CHECK_MESSAGE(positive, name);
        CHECK(a.values == make_population(name, g3).values);
    }
}

TEST_CASE("blended ranges") {
    const auto g = make_grid_2d(51);
    for (double v : make_population("blended_quadrants", g).values) {
        CHECK(v > 1.0);
        CHECK(v < 4.0);
    }
    const auto g3 = make_grid_3d(8);
    for (double v : make_population("blended_octants", g3).values) {
        CHECK(v > 1.0);
        CHECK(v < 8.0);
    }
}

TEST_CASE("unknown generators and non-positive output") {
    CHECK_THROWS_AS(evaluate_2d("nope", {0.5, 0.5}), InputError);
    CHECK_THROWS_AS(evaluate_3d("ring", {0.5, 0.5, 0.5}), InputError);
    FieldParams p;
    p.uniform_value = 0.0;
    CHECK_THROWS_AS(make_population("uniform", make_grid_2d(4), p), DomainError);
    CHECK(is_generator_2d("ring"));
    CHECK_FALSE(is_generator_2d("spherical_shell"));
    CHECK(is_generator_3d("spherical_shell"));
}

}
