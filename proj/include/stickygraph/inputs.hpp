#ifndef STICKYGRAPH_INPUTS_HPP
#define STICKYGRAPH_INPUTS_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "stickygraph/graph_model.hpp"
#include "stickygraph/graph_operator.hpp"

namespace sticky {

/// Named input functions, applied on every edge:
///   const:<c>            the constant c
///   linear               s
///   sin                  sin(pi s)
///   cos                  cos(pi s)
///   indicator:<edge-id>  1 on that edge, 0 elsewhere
GraphFunction preset_function(const MetricGraph &g, std::string_view name, std::size_t m);

/// Reads `edge_id,s,value` rows (header line required). Every edge of g must
/// appear with the same number of rows on the uniform grid s_i = i/(m-1).
GraphFunction read_function_csv(const MetricGraph &g, std::istream &in);
GraphFunction read_function_csv(const MetricGraph &g, const std::filesystem::path &path);

/// "preset:<name>" or a CSV path. A CSV fixes its own grid size; m is used for presets.
GraphFunction load_input(const MetricGraph &g, std::string_view source, std::size_t m);

void write_function_csv(std::ostream &out, const MetricGraph &g, const GraphFunction &u);

} // namespace sticky

#endif
