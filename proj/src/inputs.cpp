#include "stickygraph/inputs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "stickygraph/errors.hpp"

namespace sticky {

namespace {

double parse_number(std::string_view text, std::string_view what) {
    std::string buffer(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(buffer, &used);
    } catch (const std::exception &) {
        throw ParseError("invalid number '" + buffer + "' in " + std::string(what));
    }
    if (used != buffer.size() || !std::isfinite(value)) {
        throw ParseError("invalid number '" + buffer + "' in " + std::string(what));
    }
    return value;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

GraphFunction preset_function(const MetricGraph &g, std::string_view name, std::size_t m) {
    const std::size_t n = g.edge_count();
    if (name == "linear") {
        return GraphFunction::sample(n, m, [](std::size_t, double s) { return s; });
    }
    if (name == "sin") {
        return GraphFunction::sample(n, m, [](std::size_t, double s) { return std::sin(std::numbers::pi * s); });
    }
    if (name == "cos") {
        return GraphFunction::sample(n, m, [](std::size_t, double s) { return std::cos(std::numbers::pi * s); });
    }
    if (name.starts_with("const:")) {
        const double c = parse_number(name.substr(6), "preset const:<c>");
        return GraphFunction::constant(n, m, c);
    }
    if (name.starts_with("indicator:")) {
        const auto edge = g.index_of(name.substr(10));
        if (!edge) {
            throw ParseError("indicator preset names unknown edge '" + std::string(name.substr(10)) + "'");
        }
        return GraphFunction::sample(n, m, [e = *edge](std::size_t f, double) { return f == e ? 1.0 : 0.0; });
    }
    throw ParseError("unknown input preset '" + std::string(name) + "'");
}

GraphFunction read_function_csv(const MetricGraph &g, std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("input CSV is empty");
    }
    if (trim(line) != "edge_id,s,value") {
        throw ParseError("input CSV header must be 'edge_id,s,value'");
    }
    std::map<std::size_t, std::vector<std::pair<double, double>>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(trim(cell));
        }
        if (cells.size() != 3) {
            throw ParseError("input CSV line " + std::to_string(line_no) + ": expected 3 columns");
        }
        const auto edge = g.index_of(cells[0]);
        if (!edge) {
            throw ParseError("input CSV line " + std::to_string(line_no) + ": unknown edge '" + cells[0] + "'");
        }
        rows[*edge].emplace_back(parse_number(cells[1], "input CSV"), parse_number(cells[2], "input CSV"));
    }
    if (rows.size() != g.edge_count()) {
        throw ParseError("input CSV must cover every edge of the graph");
    }
    const std::size_t m = rows.begin()->second.size();
    if (m < 2) {
        throw ParseError("input CSV needs at least 2 samples per edge");
    }
    std::vector<GridFunction1D> edges;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        auto &samples = rows[e];
        if (samples.size() != m) {
            throw ParseError("input CSV: edge '" + g.edge(e).id + "' has a different sample count");
        }
        std::sort(samples.begin(), samples.end());
        std::vector<double> values(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double expected = static_cast<double>(i) / static_cast<double>(m - 1);
            if (std::abs(samples[i].first - expected) > 1e-9) {
                throw ParseError("input CSV: edge '" + g.edge(e).id + "' is not sampled on the uniform grid");
            }
            values[i] = samples[i].second;
        }
        edges.emplace_back(std::move(values));
    }
    return GraphFunction(std::move(edges));
}

GraphFunction read_function_csv(const MetricGraph &g, const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open input CSV '" + path.string() + "'");
    }
    return read_function_csv(g, in);
}

GraphFunction load_input(const MetricGraph &g, std::string_view source, std::size_t m) {
    if (source.starts_with("preset:")) {
        return preset_function(g, source.substr(7), m);
    }
    return read_function_csv(g, std::filesystem::path(std::string(source)));
}

void write_function_csv(std::ostream &out, const MetricGraph &g, const GraphFunction &u) {
    out << "edge_id,s,value\n";
    for (std::size_t e = 0; e < u.edge_count(); ++e) {
        for (std::size_t i = 0; i < u.grid_size(); ++i) {
            out << g.edge(e).id << ',' << u[e].x(i) << ',' << u[e][i] << '\n';
        }
    }
}

} // namespace sticky
