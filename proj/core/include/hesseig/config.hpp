#pragma once

// Run configuration: an INI-style text with [section] headers, `key = value`
// lines, `#` or `;` comments and comma-separated lists. See docs/config.md.

#include <string>
#include <utility>
#include <vector>

#include "hesseig/errors.hpp"
#include "hesseig/flow.hpp"
#include "hesseig/problem.hpp"

namespace hesseig {

enum class RunMode { eigen, oracle, sweep, verify, flow };
enum class EigenMethod { bisection, power };

[[nodiscard]] std::string to_string(RunMode mode);
[[nodiscard]] std::string to_string(EigenMethod method);

struct OutputConfig {
    std::string dir = "hesseig-out";
    bool csv = true;
    bool json = true;
    /// Binary field snapshots (.hsgf) next to the CSV ones.
    bool binary = true;
};

struct FlowConfig {
    FlowOptions options;
    /// Run the radial flow on B_R instead of the grid (forced when n != 2).
    bool radial = false;
    int radial_samples = 256;
};

struct VerifyConfig {
    /// Field snapshot (.hsgf binary) to analyse.
    std::string snapshot;
    /// Reference eigenvalue for the Rayleigh comparison; 0 means none.
    double lambda = 0.0;
    /// Dilation factors for the scaling-law check; empty skips it.
    std::vector<double> scaling;
};

struct RunConfig {
    RunMode mode = RunMode::eigen;
    ProblemSpec spec;
    /// delta values; eigen/flow use the first, sweep uses all.
    std::vector<double> deltas{0.0};
    EigenMethod method = EigenMethod::bisection;
    int jobs = 1;
    double oracle_tol = 1e-10;
    int radial_steps = 4096;
    FlowConfig flow;
    VerifyConfig verify;
    OutputConfig outputs;
};

/// Syntax or semantic error at a 1-based line and column (0 when the error
/// is not tied to a position, e.g. a missing key).
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line, int column)
        : Error("config", format(what, line, column)), line_(line), column_(column) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, int line, int column);

    int line_;
    int column_;
};

/// Parses and validates. `overrides` are `section.key=value` strings applied
/// after the text (reported as line 0).
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Canonical text of a resolved configuration; parse_config(to_ini(c))
/// reproduces c.
[[nodiscard]] std::string to_ini(const RunConfig& config);

/// Every recognised "section.key", in canonical order.
[[nodiscard]] std::vector<std::string> config_keys();

/// ("section.key", canonical value) pairs of a resolved configuration.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

}  // namespace hesseig
