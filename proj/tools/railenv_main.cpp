// Command-line front end. Links only the public C interface of the shared
// library, the same surface an external signal simulator integrates against.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "railenv.h"

namespace {

using StageFn = railenv_status (*)(const railenv_config*, char*, size_t);

struct StageSpec {
    const char* name;
    const char* description;
    StageFn fn;
};

constexpr StageSpec stages[] = {
    {"extract", "Compute per-satellite local pseudorange errors from a journey", railenv_run_extract},
    {"featurize", "Build per-epoch environment feature vectors", railenv_run_featurize},
    {"train", "Train the environment classifier", railenv_run_train},
    {"evaluate", "Evaluate the trained classifier on the held-out split", railenv_run_evaluate},
    {"fit-errors", "Fit robust per-environment Gaussian error models", railenv_run_fit_errors},
    {"simulate", "Sample an error stream along a journey schedule", railenv_run_simulate},
    {"synth", "Generate a synthetic journey dataset", railenv_run_synth},
};

int run_stage(const StageSpec& stage, const std::string& config_path, const uint64_t* seed,
              const std::string& out_dir) {
    railenv_config* config = nullptr;
    railenv_status status = railenv_config_load(config_path.c_str(), &config);
    if (status != RAILENV_OK) {
        std::fprintf(stderr, "railenv %s: %s\n", stage.name, railenv_last_error());
        return static_cast<int>(status);
    }
    if (seed) railenv_config_set_seed(config, *seed);
    if (!out_dir.empty()) railenv_config_set_out_dir(config, out_dir.c_str());

    char summary[512] = {0};
    status = stage.fn(config, summary, sizeof(summary));
    if (status != RAILENV_OK) {
        std::fprintf(stderr, "railenv %s: %s\n", stage.name, railenv_last_error());
    } else {
        std::printf("%s\n", summary);
    }
    railenv_config_free(config);
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GNSS local-error modelling toolkit for railway environments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(railenv_version()));

    struct Options {
        std::string config_path;
        uint64_t seed = 0;
        bool seed_set = false;
        std::string out_dir;
        const StageSpec* stage = nullptr;
    } options;

    for (const StageSpec& stage : stages) {
        CLI::App* sub = app.add_subcommand(stage.name, stage.description);
        sub->add_option("--config", options.config_path, "Pipeline configuration (JSON)")
            ->required();
        sub->add_option("--seed", options.seed, "Override the configured master seed")
            ->each([&options](const std::string&) { options.seed_set = true; });
        sub->add_option("--out", options.out_dir, "Override the configured output directory");
        sub->callback([&options, &stage] { options.stage = &stage; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(RAILENV_ERR_USAGE);
    }

    return run_stage(*options.stage, options.config_path,
                     options.seed_set ? &options.seed : nullptr, options.out_dir);
}
