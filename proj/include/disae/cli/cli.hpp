#pragma once

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace disae::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "DISAE_OUTPUT_ROOT";

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Applies `key=value` overrides to `doc`. Keys are dotted paths (array
// elements by index) that must already exist; values are parsed as JSON
// when possible, otherwise taken as strings.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

}  // namespace disae::cli
