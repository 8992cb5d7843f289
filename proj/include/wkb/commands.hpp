#pragma once

#include "wkb/config.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace wkb {

enum ExitStatus : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_internal = 4 };

const std::vector<std::string>& command_names();

struct CommandContext {
  std::filesystem::path output_directory;
  int workers = 1;
  std::uint64_t seed = 0;
};

// Writes artifacts under context.output_directory and returns their paths.
std::vector<std::filesystem::path> run_command(const std::string& name, const RunConfig& config,
                                               const CommandContext& context, std::ostream& log);

// JSON error line; sets status to the matching exit code.
std::string error_record(const std::exception_ptr& error, int& status);

}  // namespace wkb
