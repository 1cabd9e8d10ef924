#pragma once

#include "suites.hpp"

namespace qlax {

struct CommandResult {
    bool ok = true;
    bool check_failure = false;  // a suite ran and reported failures
    std::string text;
    nlohmann::json json;
};

// Parse and validate a JSON request into a RunConfig. Environment variables
// QLAX_Q0 and QLAX_DEGCAP override the built-in defaults.
RunConfig config_from_json(const nlohmann::json& j);

// Dispatch one command: root | flow | ham | bracket | miura | toda | limit | verify.
CommandResult run_command(const RunConfig& cfg);

}  // namespace qlax
