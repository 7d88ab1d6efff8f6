#pragma once

#include <string>

#include "core/config.hpp"

namespace railenv {

// Subcommand drivers. Each validates its inputs, writes the stage outputs
// (every file embeds the config hash) and returns a one-line summary.
// Errors are reported as railenv::Error with the appropriate status.

std::string run_extract(const PipelineConfig& config);
std::string run_featurize(const PipelineConfig& config);
std::string run_train(const PipelineConfig& config);
std::string run_evaluate(const PipelineConfig& config);
std::string run_fit_errors(const PipelineConfig& config);
std::string run_simulate(const PipelineConfig& config);
std::string run_synth(const PipelineConfig& config);

}  // namespace railenv
