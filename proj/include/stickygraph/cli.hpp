#ifndef STICKYGRAPH_CLI_HPP
#define STICKYGRAPH_CLI_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sticky::cli {

enum class Command { Validate, Resolvent, Evolve, Limit, Converge, Oracle };

enum class LogLevel { Quiet, Info, Debug };

struct RunConfig {
    Command command = Command::Validate;
    std::string graph_path;
    std::string input = "preset:sin";
    std::optional<double> lambda;
    double eps = 1.0;
    std::optional<double> t;
    std::optional<std::size_t> steps;  // empty: adaptive
    std::size_t grid = 201;
    std::vector<double> eps_list;
    std::string method = "be";
    std::string out_path;  // empty: stdout
    bool header = true;
    LogLevel log_level = LogLevel::Info;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;

/// Executes one command. CSV goes to config.out_path (or `out`), reports to
/// `out`, diagnostics to `err`. Returns 0, 1 (invalid input) or 2 (numeric failure).
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

/// Parses argv into a RunConfig and runs it.
int main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace sticky::cli

#endif
