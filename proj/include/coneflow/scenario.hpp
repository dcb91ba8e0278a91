#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace coneflow {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

// Executes one scenario; writes the JSON report to `out`, CSV dumps (if any)
// under dump_dir. Returns the process exit code: 0 Pass, 1 Fail,
// 2 Inconclusive, 3 configuration error.
int run_scenario(const nlohmann::json& scenario, std::ostream& out,
                 const std::string& dump_dir = "",
                 std::optional<std::uint64_t> seed_override = {});

int run_scenario_file(const std::string& path, std::ostream& out,
                      const std::string& dump_dir = "",
                      std::optional<std::uint64_t> seed_override = {});

}  // namespace coneflow
