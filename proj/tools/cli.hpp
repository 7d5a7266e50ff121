#pragma once

#include <string>
#include <vector>

namespace womac::cli {

/// Exit codes: 0 success, 2 validation, 3 I/O, 4 internal.
enum ExitCode { kOk = 0, kValidation = 2, kIo = 3, kInternal = 4 };

int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace womac::cli
