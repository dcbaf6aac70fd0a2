#include "stickygraph/graph_model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stickygraph/errors.hpp"

namespace sticky {

namespace {

constexpr double kRateSlack = 1e-12;
constexpr double kConservativeTol = 1e-12;

[[noreturn]] void invalid(const std::string &edge_id, const std::string &what) {
    throw ValidationError("edge '" + edge_id + "': " + what);
}

void check_rates(const MetricGraph &g, std::size_t e, End side) {
    const EdgeSpec &spec = g.edge(e);
    const auto &out = side == End::Left ? spec.l_out : spec.r_out;
    const double total = side == End::Left ? spec.l : spec.r;
    const char *name = side == End::Left ? "left" : "right";
    double sum = 0.0;
    for (const auto &[target, rate] : out) {
        if (target == spec.id) {
            invalid(spec.id, std::string(name) + " rates reference the edge itself");
        }
        if (!std::isfinite(rate) || rate < 0.0) {
            invalid(spec.id, std::string(name) + " rate to '" + target + "' must be nonnegative");
        }
        const auto f = g.index_of(target);
        if (!f) {
            invalid(spec.id, std::string(name) + " rates reference unknown edge '" + target + "'");
        }
        if (!g.cross_endpoint(e, *f, side)) {
            invalid(spec.id, std::string(name) + " rates reference edge '" + target + "' not incident to its " +
                                 (side == End::Left ? "init" : "term") + " vertex");
        }
        sum += rate;
    }
    if (sum > total + kRateSlack) {
        invalid(spec.id, std::string(name) + " rates exceed " + (side == End::Left ? "l_e" : "r_e"));
    }
}

} // namespace

MetricGraph MetricGraph::build(std::vector<EdgeSpec> edges) {
    MetricGraph g;
    g.edges_ = std::move(edges);

    std::set<std::string> ids;
    std::map<std::string, std::size_t> vertex_index;
    auto vertex = [&](const std::string &name) {
        auto [it, inserted] = vertex_index.emplace(name, g.vertices_.size());
        if (inserted) {
            g.vertices_.push_back(name);
        }
        return it->second;
    };

    for (const EdgeSpec &spec : g.edges_) {
        if (spec.id.empty()) {
            throw ValidationError("edge id must be nonempty");
        }
        if (!ids.insert(spec.id).second) {
            invalid(spec.id, "duplicate edge id");
        }
        if (spec.init.empty() || spec.term.empty()) {
            invalid(spec.id, "vertex names must be nonempty");
        }
        if (spec.init == spec.term) {
            invalid(spec.id, "loops are not allowed (init == term)");
        }
        if (!std::isfinite(spec.sigma) || spec.sigma <= 0.0) {
            invalid(spec.id, "sigma must be positive");
        }
        if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
            invalid(spec.id, "p must lie in [0,1]");
        }
        if (!(spec.q >= 0.0 && spec.q <= 1.0)) {
            invalid(spec.id, "q must lie in [0,1]");
        }
        if (!std::isfinite(spec.l) || spec.l < 0.0) {
            invalid(spec.id, "l must be nonnegative");
        }
        if (!std::isfinite(spec.r) || spec.r < 0.0) {
            invalid(spec.id, "r must be nonnegative");
        }
        g.init_index_.push_back(vertex(spec.init));
        g.term_index_.push_back(vertex(spec.term));
    }

    const std::size_t n = g.edges_.size();
    for (std::size_t e = 0; e < n; ++e) {
        check_rates(g, e, End::Left);
        check_rates(g, e, End::Right);
    }

    g.left_couplings_.resize(n);
    g.right_couplings_.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        for (End side : {End::Left, End::Right}) {
            const auto &out = side == End::Left ? g.edges_[e].l_out : g.edges_[e].r_out;
            auto &dest = side == End::Left ? g.left_couplings_[e] : g.right_couplings_[e];
            // Edge order.
            for (std::size_t f = 0; f < n; ++f) {
                auto it = out.find(g.edges_[f].id);
                if (it == out.end() || it->second == 0.0) {
                    continue;
                }
                dest.push_back({*g.cross_endpoint(e, f, side), it->second});
            }
        }
    }
    return g;
}

std::optional<std::size_t> MetricGraph::index_of(std::string_view id) const {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edges_[e].id == id) {
            return e;
        }
    }
    return std::nullopt;
}

int MetricGraph::incidence(std::size_t vertex, std::size_t edge) const {
    if (init_index_[edge] == vertex) {
        return -1;
    }
    if (term_index_[edge] == vertex) {
        return 1;
    }
    return 0;
}

std::optional<EndpointRef> MetricGraph::cross_endpoint(std::size_t e, std::size_t f, End side) const {
    if (e == f) {
        return std::nullopt;
    }
    const std::size_t v = side == End::Left ? init_index_[e] : term_index_[e];
    if (init_index_[f] == v) {
        return EndpointRef{f, End::Left};
    }
    if (term_index_[f] == v) {
        return EndpointRef{f, End::Right};
    }
    return std::nullopt;
}

namespace {

using nlohmann::json;

double number_field(const json &obj, const char *key, const std::string &edge_id, bool required, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) {
            throw ParseError("edge '" + edge_id + "': missing field '" + key + "'");
        }
        return fallback;
    }
    if (!it->is_number()) {
        throw ParseError("edge '" + edge_id + "': field '" + key + "' must be a number");
    }
    return it->get<double>();
}

std::string string_field(const json &obj, const char *key, const std::string &edge_id) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError("edge '" + edge_id + "': missing field '" + key + "'");
    }
    if (!it->is_string()) {
        throw ParseError("edge '" + edge_id + "': field '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

std::map<std::string, double> rate_map(const json &obj, const char *key, const std::string &edge_id) {
    std::map<std::string, double> out;
    auto it = obj.find(key);
    if (it == obj.end()) {
        return out;
    }
    if (!it->is_object()) {
        throw ParseError("edge '" + edge_id + "': field '" + key + "' must be an object");
    }
    for (const auto &[target, rate] : it->items()) {
        if (!rate.is_number()) {
            throw ParseError("edge '" + edge_id + "': rate '" + key + "." + target + "' must be a number");
        }
        out.emplace(target, rate.get<double>());
    }
    return out;
}

} // namespace

MetricGraph parse_graph(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &err) {
        throw ParseError(std::string("malformed graph document: ") + err.what());
    }
    if (!doc.is_object()) {
        throw ParseError("graph document must be an object");
    }
    for (const auto &[key, value] : doc.items()) {
        if (key != "edges") {
            throw ParseError("unknown top-level key '" + key + "'");
        }
    }
    auto edges_it = doc.find("edges");
    if (edges_it == doc.end() || !edges_it->is_array()) {
        throw ParseError("graph document needs an 'edges' array");
    }

    static const std::set<std::string> known = {"id", "init", "term", "sigma", "p", "q",
                                                 "l",  "r",    "l_out", "r_out"};
    std::vector<EdgeSpec> edges;
    for (const json &item : *edges_it) {
        if (!item.is_object()) {
            throw ParseError("each edge must be an object");
        }
        std::string id = item.contains("id") && item["id"].is_string() ? item["id"].get<std::string>() : "?";
        for (const auto &[key, value] : item.items()) {
            if (!known.contains(key)) {
                throw ParseError("edge '" + id + "': unknown key '" + key + "'");
            }
        }
        EdgeSpec spec;
        spec.id = string_field(item, "id", id);
        spec.init = string_field(item, "init", id);
        spec.term = string_field(item, "term", id);
        spec.sigma = number_field(item, "sigma", id, true, 1.0);
        spec.p = number_field(item, "p", id, true, 0.0);
        spec.q = number_field(item, "q", id, true, 0.0);
        spec.l = number_field(item, "l", id, false, 0.0);
        spec.r = number_field(item, "r", id, false, 0.0);
        spec.l_out = rate_map(item, "l_out", id);
        spec.r_out = rate_map(item, "r_out", id);
        edges.push_back(std::move(spec));
    }
    return MetricGraph::build(std::move(edges));
}

MetricGraph load_graph(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open graph file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_graph(buffer.str());
}

std::string serialize_graph(const MetricGraph &g) {
    json edges = json::array();
    for (const EdgeSpec &spec : g.edges()) {
        json item;
        item["id"] = spec.id;
        item["init"] = spec.init;
        item["term"] = spec.term;
        item["sigma"] = spec.sigma;
        item["p"] = spec.p;
        item["q"] = spec.q;
        item["l"] = spec.l;
        item["r"] = spec.r;
        item["l_out"] = json::object();
        for (const auto &[k, v] : spec.l_out) {
            item["l_out"][k] = v;
        }
        item["r_out"] = json::object();
        for (const auto &[k, v] : spec.r_out) {
            item["r_out"][k] = v;
        }
        edges.push_back(std::move(item));
    }
    json doc;
    doc["edges"] = std::move(edges);
    return doc.dump(2);
}

bool is_conservative(const MetricGraph &g) {
    for (const EdgeSpec &spec : g.edges()) {
        double left = 0.0;
        for (const auto &[k, v] : spec.l_out) {
            left += v;
        }
        double right = 0.0;
        for (const auto &[k, v] : spec.r_out) {
            right += v;
        }
        if (std::abs(left - spec.l) > kConservativeTol || std::abs(right - spec.r) > kConservativeTol) {
            return false;
        }
    }
    return true;
}

} // namespace sticky
