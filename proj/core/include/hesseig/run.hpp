#pragma once

// Mode dispatch for a validated RunConfig: runs the solver, writes CSV/JSON
// reports and field snapshots under the output directory, and prints a short
// summary. See docs/reports.md for the JSON layout.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hesseig/config.hpp"

namespace hesseig {

struct RunOptions {
    /// Takes precedence over HESSEIG_OUT and outputs.dir.
    std::optional<std::string> out_dir;
};

struct RunOutcome {
    /// 0 on success, 1 when the run failed (an error report was written).
    int exit_code = 0;
    std::string output_dir;
    /// Files written, in order.
    std::vector<std::string> artifacts;
};

/// --out, else the HESSEIG_OUT environment variable, else outputs.dir.
[[nodiscard]] std::string resolve_output_dir(const RunConfig& config, const RunOptions& options);

/// Never throws for solver failures: they become an error JSON on `err`
/// (and error.json in the output directory when it can be created).
RunOutcome run(const RunConfig& config, std::ostream& out, std::ostream& err, const RunOptions& options = {});

/// {"status": "error", "kind", "message", ...context} as a single JSON line.
[[nodiscard]] std::string error_json(const std::string& kind, const std::string& message,
                                     const std::vector<std::pair<std::string, std::string>>& context = {});

}  // namespace hesseig
