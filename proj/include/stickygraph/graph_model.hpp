#ifndef STICKYGRAPH_GRAPH_MODEL_HPP
#define STICKYGRAPH_GRAPH_MODEL_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sticky {

/// Edge ends in the [0,1] parametrisation: Left is x = 0, Right is x = 1.
enum class End { Left, Right };

/// One edge of the metric graph together with its membrane data.
///
/// l_out / r_out hold the rates l_{e,f} / r_{e,f} keyed by target edge id; they
/// may only name edges incident to init / term respectively, and their sums are
/// bounded by l / r. Any deficit l - sum(l_out) is killing at that membrane.
struct EdgeSpec {
    std::string id;
    std::string init;
    std::string term;
    double sigma = 1.0;
    double p = 0.0;
    double q = 0.0;
    double l = 0.0;
    double r = 0.0;
    std::map<std::string, double> l_out;
    std::map<std::string, double> r_out;

    bool operator==(const EdgeSpec &) const = default;
};

struct EndpointRef {
    std::size_t edge;
    End end;

    bool operator==(const EndpointRef &) const = default;
};

/// A resolved membrane transition: rate into the given endpoint of another edge.
struct Coupling {
    EndpointRef target;
    double rate;
};

/// Finite loop-free graph whose edges are copies of [0,1].
///
/// Immutable once built. Edge order is the order of the input list and fixes
/// every boundary-vector layout in the library: index 2e is the left end of
/// edge e, 2e+1 the right end.
class MetricGraph {
  public:
    /// Validates every edge constraint; throws ValidationError naming the edge.
    static MetricGraph build(std::vector<EdgeSpec> edges);

    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<EdgeSpec> &edges() const { return edges_; }
    const EdgeSpec &edge(std::size_t e) const { return edges_[e]; }
    std::optional<std::size_t> index_of(std::string_view id) const;

    const std::vector<std::string> &vertices() const { return vertices_; }
    /// -1 if v is the initial vertex of e, +1 if terminal, 0 otherwise.
    int incidence(std::size_t vertex, std::size_t edge) const;

    /// f_e^- (side = Left) or f_e^+ (side = Right): the endpoint of f sitting at
    /// the vertex where e has its left/right end. Empty if f is not incident there.
    std::optional<EndpointRef> cross_endpoint(std::size_t e, std::size_t f, End side) const;

    const std::vector<Coupling> &couplings(std::size_t e, End side) const {
        return side == End::Left ? left_couplings_[e] : right_couplings_[e];
    }

    bool operator==(const MetricGraph &other) const { return edges_ == other.edges_; }

  private:
    MetricGraph() = default;

    std::vector<EdgeSpec> edges_;
    std::vector<std::string> vertices_;
    std::vector<std::size_t> init_index_;
    std::vector<std::size_t> term_index_;
    std::vector<std::vector<Coupling>> left_couplings_;
    std::vector<std::vector<Coupling>> right_couplings_;
};

/// Parses the JSON graph document `{"edges": [...]}`.
/// Throws ParseError on syntax/schema problems and ValidationError on
/// constraint violations.
MetricGraph parse_graph(std::string_view text);
MetricGraph load_graph(const std::filesystem::path &path);
std::string serialize_graph(const MetricGraph &g);

/// Membrane mass is fully routed: sum_f l_{e,f} = l_e and sum_f r_{e,f} = r_e
/// for all edges (absolute tolerance 1e-12).
bool is_conservative(const MetricGraph &g);

} // namespace sticky

#endif
