#pragma once

namespace anneal {

/// Entry point behind the `anneal` binary; exposed so tests can drive the
/// command surface directly. Exit codes: 0 success, 1 run failure(s),
/// 2 configuration or usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace anneal
