#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <froth/config.hpp>

namespace froth::cli {

struct Context {
  RunConfig config;
  std::filesystem::path out;
};

void cmd_instanton(const Context& ctx, std::ostream& log);
void cmd_eh_curve(const Context& ctx, std::ostream& log);
void cmd_minimize(const Context& ctx, std::ostream& log);
void cmd_coarse_grain(const Context& ctx, std::ostream& log);
// Throws CertificateFailure naming every failing certificate.
void cmd_verify(const Context& ctx, std::ostream& log);
void cmd_report(const Context& ctx, std::ostream& log);

// Parses arguments, dispatches and maps exceptions onto the exit codes
// 0 ok, 1 config or parse error, 2 numerical failure, 3 certificate failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace froth::cli
