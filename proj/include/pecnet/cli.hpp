#pragma once

#include <string>
#include <vector>

#include "pecnet/config.hpp"
#include "pecnet/data.hpp"

namespace pecnet::cli {

// Exit codes: 0 success, 1 config/io error, 2 numerical divergence.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

// Dataset assembly shared between commands (and driven directly by tests).
// Manifest datasets are windowed and batched per scene file so no social
// edge can cross files; synthetic datasets come from the generator keyed by
// synth_seed.
std::vector<SceneBatch> load_train_batches(const RunConfig& cfg);
std::vector<SceneBatch> load_eval_batches(const RunConfig& cfg);

}  // namespace pecnet::cli
