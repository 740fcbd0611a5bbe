#pragma once

#include <string>

namespace fbp::cli {

// Runs one scenario described by the JSON config text; writes artifacts and a
// manifest.json into out_dir. Returns 0 on success. Invalid configs produce a
// nonzero status and an error.json in out_dir (also echoed to stderr).
int run(const std::string& config_json_text, const std::string& out_dir, bool verbose = false);

// Aggregates manifest.json files found in `directory` and its immediate
// subdirectories into a single pass/fail JSON document.
std::string report_summary(const std::string& directory);

}  // namespace fbp::cli
