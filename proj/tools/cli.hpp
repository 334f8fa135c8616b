#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ukfm::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kDiverged = 2 };

/// Entry point of the ukfm command-line tool. Output goes to `out`,
/// diagnostics to `err`.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ukfm::cli
