#pragma once

namespace gkbm {

/// Entry point behind the gkbm binary, exposed so tests can drive the CLI
/// in-process. Exit codes: 0 success, 1 validation/usage error, 2 runtime
/// failure.
int cli_main(int argc, const char* const* argv);

}  // namespace gkbm
