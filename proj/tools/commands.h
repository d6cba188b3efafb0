#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msdi/harness.h"

namespace msdi::cli {

struct CommandOptions {
    RunConfig cfg;
    /// test-phase: "pass" or "abort", the verdict the devices should get.
    std::string expect = "pass";
    /// compose-check: "", "alice" or "bob". Nonempty runs the simulator comparison for the inner protocol.
    std::string corrupt;
    bool log_runs = false;
};

struct CommandResult {
    Report report;
    /// Evaluator report(s) as JSON.
    nlohmann::json detail = nlohmann::json::object();
    /// Per-run records, filled only with log_runs.
    std::vector<nlohmann::json> runs;
};

CommandResult ms_facts(const CommandOptions &o);
CommandResult ot_run(const CommandOptions &o);
CommandResult ot_security(const CommandOptions &o);
CommandResult bc_run(const CommandOptions &o);
CommandResult bc_hiding(const CommandOptions &o);
CommandResult bc_binding(const CommandOptions &o);
CommandResult test_phase(const CommandOptions &o);
CommandResult compose_check(const CommandOptions &o);

/// One-line rendering of a verdict.
std::string claim_line(const ClaimResult &c);

}  // namespace msdi::cli
