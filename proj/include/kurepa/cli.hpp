#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kurepa/kernels.hpp"
#include "kurepa/search.hpp"

namespace kurepa::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,         // verification mismatches
    kArgumentError = 2,
    kIoError = 3,
    kCounterexample = 10,  // a scan found r_p = 0
};

struct Overrides {
    // Scan kernel replacement, for exercising the counterexample path in tests.
    decltype(ScanHooks::kernel) kernel;
};

// Three-column (p, r_p) table, filled column by column.
std::string format_residue_table(std::span<const ResidueRecord> records, int columns = 3);

// Parses args (without the program name), runs the command, writes the report to out and
// diagnostics to err. Lines carrying timings start with '#'.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Overrides& overrides = {});

} // namespace kurepa::cli
