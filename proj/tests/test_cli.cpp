#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "stickygraph/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "stickygraph");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = sticky::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "stickygraph_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string &name, const std::string &text) {
    const fs::path path = scratch() / name;
    std::ofstream(path) << text;
    return path;
}

std::string star_path() { return write_file("star.json", sticky::serialize_graph(fixtures::star3())).string(); }

std::vector<std::vector<std::string>> csv_rows(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("validate") {
    const auto ok = run_cli({"validate", star_path()});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("conservative: true") != std::string::npos);

    const auto leaky =
        write_file("leaky.json", sticky::serialize_graph(fixtures::star3(0.3, 0.3, {1, 2, 0.5}, 0.5))).string();
    CHECK(run_cli({"validate", leaky}).out.find("conservative: false") != std::string::npos);

    const auto bad = write_file("bad.json", R"({"edges": [{"id": "e", "init": "a", "term": "a", "sigma": 1, "p": 0, "q": 0}]})");
    const auto fail = run_cli({"validate", bad.string()});
    CHECK(fail.code == 1);
    CHECK(fail.err.find("error") != std::string::npos);
    CHECK(run_cli({"validate", "/nonexistent.json"}).code == 1);
}

TEST_CASE("resolvent writes residual columns") {
    const auto out = (scratch() / "r.csv").string();
    const auto r = run_cli({"resolvent", "--graph", star_path(), "--lambda", "5", "--eps", "0.5", "--input", "preset:sin",
                            "--out", out});
    REQUIRE(r.code == 0);
    std::ifstream in(out);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto rows = csv_rows(text);
    REQUIRE(rows.size() == 1 + 3 * 201);
    CHECK(rows[0] == std::vector<std::string>{"edge_id", "s", "value", "residual_ode", "residual_boundary"});
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(std::stod(rows[k][3]) <= 1e-7);
        CHECK(std::stod(rows[k][4]) <= 1e-7);
    }
    CHECK(text.front() == '#');
}

TEST_CASE("output is deterministic and the header can be disabled") {
    const std::vector<std::string> args{"evolve", "--graph", star_path(), "--t", "0.5", "--steps", "16", "--grid", "21"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto plain = args;
    plain.push_back("--no-header");
    const auto c = run_cli(plain);
    CHECK(c.out.front() != '#');
    CHECK(c.out.rfind("edge_id,s,value\n", 0) == 0);
}

TEST_CASE("converge prints a strictly decreasing error table") {
    const auto r = run_cli({"converge", "--graph", star_path(), "--t", "1", "--eps-list", "1e-1,1e-2,1e-3", "--grid", "51",
                            "--no-header"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"eps", "n_steps", "err_sup"});
    CHECK(std::stod(rows[2][2]) < std::stod(rows[1][2]));
    CHECK(std::stod(rows[3][2]) < std::stod(rows[2][2]));
}

TEST_CASE("limit and oracle commands") {
    const auto graph = star_path();
    const auto lim = run_cli({"limit", "--graph", graph, "--t", "1", "--input", "preset:indicator:e1", "--grid", "3",
                              "--no-header"});
    CHECK(lim.code == 0);
    CHECK(csv_rows(lim.out).size() == 1 + 3 * 3);
    CHECK(run_cli({"limit", "--graph", graph, "--grid", "3"}).code == 1);

    const auto out = (scratch() / "o.csv").string();
    const auto orc = run_cli({"oracle", "--graph", graph, "--lambda", "5", "--eps", "0.5", "--out", out});
    CHECK(orc.code == 0);
    const auto pos = orc.out.find("max_abs_diff: ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(orc.out.substr(pos + 14)) < 5e-3);
}

TEST_CASE("input CSV round trip through the CLI") {
    const auto graph = star_path();
    const auto first = run_cli({"limit", "--graph", graph, "--lambda", "2", "--grid", "11", "--no-header"});
    REQUIRE(first.code == 0);
    const auto csv = write_file("in.csv", first.out);
    const auto second = run_cli({"limit", "--graph", graph, "--lambda", "2", "--input", csv.string(), "--no-header"});
    CHECK(second.code == 0);
    CHECK(csv_rows(second.out).size() == csv_rows(first.out).size());
}

TEST_CASE("usage errors") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"resolvent", "--graph", star_path()}).code == 1);
    CHECK(run_cli({"resolvent", "--graph", star_path(), "--lambda", "-1"}).code == 1);
    CHECK(run_cli({"evolve", "--graph", star_path(), "--t", "1", "--method", "rk4"}).code == 1);
    CHECK(run_cli({"converge", "--graph", star_path(), "--t", "1", "--eps-list", "2"}).code == 1);
    CHECK(run_cli({"resolvent", "--graph", star_path(), "--lambda", "1", "--input", "preset:bogus"}).code == 1);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("numeric failure exits with code 2") {
    const auto r = run_cli({"resolvent", "--graph", star_path(), "--lambda", "1e-12", "--eps", "1", "--grid", "11"});
    CHECK(r.code == 2);
    CHECK(r.err.find("condition") != std::string::npos);
}
