#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldem/geometry.hpp"
#include "ldem/metrics.hpp"

namespace ldem::cli {

// Fixed "%.10g" rendering; NaN is written as NA.
std::string format_number(double value);

struct SummaryRow {
    std::string case_name;
    std::string method;
    std::optional<QualityReport> report;  // empty: the run failed, metrics are NA
    std::optional<double> runtime_s;      // empty: NA
};

inline constexpr const char* summary_header = "case,method,bc_mean,bc_max,de_error,foldovers,runtime_s";

std::string summary_csv(std::span<const SummaryRow> rows);
void write_text_file(const std::string& path, const std::string& text);

// One row per element: id, population, measure, density, |mu| (2D only).
std::string element_csv(const QualityReport& report, std::span<const double> populations,
                        std::span<const double> measures);

// Initial and final rho/mean(rho) histograms as overlaid step outlines.
std::string histogram_svg(const Histogram& histogram, const std::string& title);

// Deformed triangulation filled by a colour ramp over `values`.
std::string map_svg(std::span<const Vec2> vertices, std::span<const Tri> faces, std::span<const double> values,
                    const std::string& title);

// "id,value" rows (an optional header line is skipped); every id in
// [0, count) must appear exactly once.
std::vector<double> read_population_csv(const std::string& path, std::size_t count);

}  // namespace ldem::cli
