#pragma once

// Subcommands of the qrecur command-line tool. Each writes its files into
// cfg.out_dir and returns a process exit code.

#include "qrecur/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qrecur {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitUnresolved = 4,
};

// Prefix of the single line excluded from byte-for-byte output comparisons.
inline constexpr std::string_view kTimestampPrefix = "# generated:";

int cmd_times(const RunConfig& cfg, std::ostream& console);
int cmd_spectrum(const RunConfig& cfg, std::ostream& console);
int cmd_evolve(const RunConfig& cfg, std::ostream& console);
int cmd_sweep(const RunConfig& cfg, std::ostream& console);

struct CheckResult {
    std::string module;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Invariant suite. `module` restricts it to one module; `tol` replaces every
// check's own tolerance.
std::vector<CheckResult> run_verify(const std::optional<std::string>& module,
                                    const std::optional<double>& tol);
const std::vector<std::string>& verify_modules();
int cmd_verify(const std::optional<std::string>& module, const std::optional<double>& tol,
               std::ostream& console);

// Full command line, as used by the qrecur executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qrecur
