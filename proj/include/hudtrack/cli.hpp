#pragma once

#include <ostream>

namespace hudtrack::cli {

/// Subcommands: synth, pipeline, roi preview, serve-annotator, compare,
/// export. Returns the process exit code: 0 success, 1 fatal, 2 partial.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hudtrack::cli
