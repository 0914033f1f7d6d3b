#include "artifacts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ldem/error.hpp"

namespace ldem::cli {

namespace {

constexpr double plot_w = 640, plot_h = 400, margin = 50;

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

// Piecewise-linear ramp through a few viridis stops.
std::string ramp(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops = {
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * (stops.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double u = t - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] * (1 - u) + stops[i + 1][0] * u)),
                  static_cast<int>(std::lround(stops[i][1] * (1 - u) + stops[i + 1][1] * u)),
                  static_cast<int>(std::lround(stops[i][2] * (1 - u) + stops[i + 1][2] * u)));
    return buf;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
    std::ostringstream os;
    os << summary_header << '\n';
    for (const auto& r : rows) {
        os << r.case_name << ',' << r.method << ',';
        if (r.report) {
            os << format_number(r.report->bc_mean) << ',' << format_number(r.report->bc_max) << ','
               << format_number(r.report->de_error) << ',' << r.report->foldovers << ',';
        } else {
            os << "NA,NA,NA,NA,";
        }
        os << (r.runtime_s ? format_number(*r.runtime_s) : "NA") << '\n';
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("failed writing '" + path + "'");
}

std::string element_csv(const QualityReport& report, std::span<const double> populations,
                        std::span<const double> measures) {
    std::ostringstream os;
    const bool planar = report.dimension == 2;
    os << (planar ? "face,population,area,density,bc_abs\n" : "cell,population,volume,density\n");
    for (std::size_t i = 0; i < populations.size(); ++i) {
        os << i << ',' << format_number(populations[i]) << ',' << format_number(measures[i]) << ','
           << format_number(report.densities[i]);
        if (planar) os << ',' << format_number(report.bc_abs[i]);
        os << '\n';
    }
    return os.str();
}

std::string histogram_svg(const Histogram& h, const std::string& title) {
    std::ostringstream os;
    const double w = plot_w - 2 * margin, ht = plot_h - 2 * margin;
    long peak = 1;
    for (long c : h.initial) peak = std::max(peak, c);
    for (long c : h.final) peak = std::max(peak, c);
    const double x0 = h.edges.front(), x1 = h.edges.back();
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * w; };
    auto py = [&](double c) { return plot_h - margin - c / static_cast<double>(peak) * ht; };
    auto outline = [&](const std::vector<long>& counts) {
        std::string d = "M" + fixed(px(x0)) + "," + fixed(py(0));
        for (std::size_t b = 0; b < counts.size(); ++b) {
            d += " L" + fixed(px(h.edges[b])) + "," + fixed(py(static_cast<double>(counts[b])));
            d += " L" + fixed(px(h.edges[b + 1])) + "," + fixed(py(static_cast<double>(counts[b])));
        }
        return d + " L" + fixed(px(x1)) + "," + fixed(py(0));
    };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot_w << "\" height=\"" << plot_h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(title)
       << "</text>\n";
    os << "<path d=\"" << outline(h.initial) << "\" fill=\"#9e9e9e\" fill-opacity=\"0.5\" stroke=\"#616161\"/>\n";
    os << "<path d=\"" << outline(h.final) << "\" fill=\"#1e88e5\" fill-opacity=\"0.5\" stroke=\"#0d47a1\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << plot_h - margin << "\" x2=\"" << plot_w - margin << "\" y2=\""
       << plot_h - margin << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << plot_h - margin
       << "\" stroke=\"black\"/>\n";
    const int ticks = 4;
    for (int t = 0; t <= ticks; ++t) {
        const double x = x0 + (x1 - x0) * t / ticks;
        os << "<text x=\"" << fixed(px(x)) << "\" y=\"" << plot_h - margin + 18 << "\" text-anchor=\"middle\" font-size=\"12\">"
           << fixed(x, 2) << "</text>\n";
    }
    os << "<text x=\"" << margin - 6 << "\" y=\"" << margin + 4 << "\" text-anchor=\"end\" font-size=\"12\">" << peak
       << "</text>\n";
    os << "<text x=\"" << plot_w / 2 << "\" y=\"" << plot_h - 10
       << "\" text-anchor=\"middle\" font-size=\"13\">rho / mean(rho)</text>\n";
    os << "<text x=\"" << plot_w - margin << "\" y=\"" << margin << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#616161\">initial</text>\n";
    os << "<text x=\"" << plot_w - margin << "\" y=\"" << margin + 16
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#0d47a1\">final</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string map_svg(std::span<const Vec2> vertices, std::span<const Tri> faces, std::span<const double> values,
                    const std::string& title) {
    const double size = 600, pad = 30;
    Vec2 lo = vertices[0], hi = vertices[0];
    for (const auto& v : vertices)
        for (int k = 0; k < 2; ++k) {
            lo[k] = std::min(lo[k], v[k]);
            hi[k] = std::max(hi[k], v[k]);
        }
    const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
    auto sx = [&](const Vec2& v) { return pad + (v[0] - lo[0]) / span * (size - 2 * pad); };
    auto sy = [&](const Vec2& v) { return size - pad - (v[1] - lo[1]) / span * (size - 2 * pad); };
    const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
    const double range = *vmax - *vmin;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20 << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(title)
       << "</text>\n<g transform=\"translate(0,20)\" stroke-width=\"0.3\">\n";
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& t = faces[f];
        const std::string colour = ramp(range > 0 ? (values[f] - *vmin) / range : 0.5);
        os << "<polygon points=\"";
        for (int i = 0; i < 3; ++i) {
            const Vec2& v = vertices[static_cast<std::size_t>(t[i])];
            os << (i ? " " : "") << fixed(sx(v)) << ',' << fixed(sy(v));
        }
        os << "\" fill=\"" << colour << "\" stroke=\"" << colour << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::vector<double> read_population_csv(const std::string& path, std::size_t count) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open population file '" + path + "'");
    std::vector<double> values(count, 0.0);
    std::vector<char> seen(count, 0);
    std::string line;
    std::size_t lineno = 0, filled = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InputError(path + ":" + std::to_string(lineno) + ": expected 'id,value'");
        long id = 0;
        double value = 0.0;
        try {
            std::size_t used = 0;
            id = std::stol(line.substr(0, comma), &used);
            value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw InputError(path + ":" + std::to_string(lineno) + ": cannot parse '" + line + "'");
        }
        if (id < 0 || static_cast<std::size_t>(id) >= count)
            throw InputError(path + ":" + std::to_string(lineno) + ": id " + std::to_string(id) + " out of range");
        if (seen[static_cast<std::size_t>(id)]++)
            throw InputError(path + ":" + std::to_string(lineno) + ": duplicate id " + std::to_string(id));
        values[static_cast<std::size_t>(id)] = value;
        ++filled;
    }
    if (filled != count)
        throw InputError(path + ": " + std::to_string(filled) + " values for " + std::to_string(count) + " elements");
    return values;
}

}  // namespace ldem::cli
