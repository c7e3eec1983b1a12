#pragma once

#include <iosfwd>
#include <string>

#include "nehari/config.hpp"

namespace nehari {

inline constexpr const char* kArtifactName = "nehari-lab";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Exit-code contract shared by all subcommands:
///   0 success, 1 mathematical/hypothesis/numeric failure, 2 usage/parse.
int cmd_check(const RunConfig& cfg, std::ostream& out, bool quiet);
int cmd_constants(const RunConfig& cfg, std::ostream& out, bool quiet);
int cmd_fiber(const RunConfig& cfg, std::ostream& out, bool quiet);
int cmd_solve(const RunConfig& cfg, std::ostream& out, bool quiet);
int cmd_verify(const RunConfig& cfg, std::ostream& out, bool quiet);

/// Dispatch by subcommand name; unknown names return 2.
int run_command(const std::string& name, const RunConfig& cfg,
                std::ostream& out, bool quiet);

} // namespace nehari
