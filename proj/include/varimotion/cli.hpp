#pragma once

#include "varimotion/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace vmo {

// Every command is a pure function of the config (command-specific arguments
// are injected as "<command>.<arg>" keys by the CLI front end). Outputs land
// under run.out_dir; an exclusive lockfile guards the directory. Throws on
// failure; the front end turns that into a one-line diagnostic and a nonzero
// exit code.
void cmd_gen_data(const RunConfig& config, std::ostream& log);
void cmd_train_varishape(const RunConfig& config, std::ostream& log);
void cmd_train_mogen(const RunConfig& config, std::ostream& log);
void cmd_retrieve(const RunConfig& config, std::ostream& log);
void cmd_interp(const RunConfig& config, std::ostream& log);
void cmd_extrap(const RunConfig& config, std::ostream& log);
void cmd_transfer(const RunConfig& config, std::ostream& log);
void cmd_sample(const RunConfig& config, std::ostream& log);
void cmd_interp4d(const RunConfig& config, std::ostream& log);
void cmd_eval(const RunConfig& config, std::ostream& log);
void cmd_dist(const RunConfig& config, std::ostream& log);

// Dispatch by subcommand name; returns false for an unknown command.
bool run_command(const std::string& name, const RunConfig& config, std::ostream& log);

const std::vector<std::string>& command_names();

} // namespace vmo
