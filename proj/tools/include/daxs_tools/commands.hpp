#pragma once

namespace daxs::tools {

/// Exit codes: 0 success, 1 runtime failure, 2 bad input or usage.
int run_cli(int argc, char** argv);

}  // namespace daxs::tools
