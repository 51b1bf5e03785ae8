#pragma once

namespace mld::cli {

/// Full command-line surface: `inspect`, `resample`, `evaluate`, `bench`.
/// Returns the process exit code: 0 on success (all requested artifacts
/// written), 2 for usage/config/validation problems, 1 for runtime failures.
/// Partially written outputs are removed on failure.
int run(int argc, const char* const* argv);

}  // namespace mld::cli
