// SPDX-License-Identifier: MIT
//
// emweak: run a weak-convergence experiment described by a JSON config.
//
//   emweak --config exp.json [--seed N] [--paths N] [--out DIR] [--pipeline NAME]
//   emweak --list
//
// Worker threads: EMWEAK_WORKERS (default: hardware concurrency).
#include "emweak/config.hpp"
#include "emweak/error.hpp"
#include "emweak/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

void print_catalogue() {
    for (const auto& b : emweak::list_builtins()) {
        const auto& d = b.problem.drift;
        std::cout << b.name << "\n  " << b.description << "\n  kind=" << emweak::to_string(b.problem.kind)
                  << " growth=" << emweak::to_string(d.growth) << " class_a=" << (d.any_class_a() ? "true" : "false");
        if (d.holder_alpha) std::cout << " alpha=" << *d.holder_alpha;
        if (b.girsanov_warning) std::cout << " girsanov_warning=true";
        if (b.known_reference) std::cout << "\n  reference=" << *b.known_reference;
        if (!b.reference_note.empty()) std::cout << " (" << b.reference_note << ")";
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler-Maruyama weak error experiments"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::string> out_dir;
    std::optional<std::string> pipeline;
    bool list = false;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--seed", seed, "master seed, overrides the config");
    app.add_option("--paths", paths, "Monte Carlo paths per estimate, overrides the config");
    app.add_option("--out", out_dir, "output directory, overrides the config");
    app.add_option("--pipeline", pipeline, "pipeline name, overrides the config");
    app.add_flag("--list", list, "print the built-in problem catalogue");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        print_catalogue();
        return 0;
    }
    if (config_path.empty()) {
        std::cerr << "error: --config is required\n";
        return emweak::kExitConfigError;
    }

    emweak::ExperimentConfig config;
    try {
        std::ifstream is(config_path, std::ios::binary);
        if (!is) throw emweak::ConfigError("cannot read config '" + config_path + "'");
        std::ostringstream text;
        text << is.rdbuf();
        config = emweak::parse_config(text.str());
        if (seed) config.seed = *seed;
        if (paths) config.n_paths = *paths;
        if (out_dir) config.output.dir = *out_dir;
        if (pipeline) config.pipeline = emweak::pipeline_from_string(*pipeline);
    } catch (const emweak::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return emweak::kExitConfigError;
    }

    try {
        const auto result = emweak::run_experiment(config);
        if (result.status == emweak::kExitConfigError) {
            std::cerr << "config error: " << result.message << "\n";
        } else {
            std::cout << result.message << "\n";
        }
        return result.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
