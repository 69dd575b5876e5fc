#ifndef PEGTRACE_REPORT_HPP
#define PEGTRACE_REPORT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pegtrace/tracer.hpp"

namespace pegtrace {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitTracerFault = 3;

struct RunConfig {
  std::string command;
  std::string input;
  std::string outdir = ".";
  uint64_t seed = 1;
  int grid = 40;
  bool svg = false;
  bool dump = false;
  bool check = false;
  int ngon = 5;
  int count = 1;
  TraceConfig trace;
};

struct CommandResult {
  int exit_code = kExitOk;
  // (file name, content) pairs the command produced; callers write them.
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
};

CommandResult cmd_diameters(const RunConfig& cfg);
CommandResult cmd_trace(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_coincidences(const RunConfig& cfg);
CommandResult cmd_generate(const RunConfig& cfg);

// Dispatch on cfg.command; unknown commands report an input error.
CommandResult run_command(const RunConfig& cfg);

// Writes result files under cfg.outdir and returns the exit code.
int execute_and_write(const RunConfig& cfg, std::string* summary_out = nullptr);

}  // namespace pegtrace

#endif
