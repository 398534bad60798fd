#include "varimotion/cli.hpp"
#include "varimotion/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"varimotion: varifold-based latent retrieval and lifted motion geometry"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Config file (INI-style sections)");
    app.add_option("--seed", seed, "Master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--out", out_dir, "Output directory (overrides config)");
    app.add_option("--set", overrides, "Override any key: --set section.key=value");

    // Per-command convenience flags, mapped onto config keys.
    struct Flag {
        std::string command, option, key, value;
    };
    std::vector<Flag> flags = {
        {"retrieve", "--mesh", "retrieve.mesh", ""},
        {"interp", "--seq", "interp.seq", ""},
        {"interp", "--steps", "interp.steps", ""},
        {"extrap", "--seq", "extrap.seq", ""},
        {"extrap", "--steps", "extrap.steps", ""},
        {"transfer", "--seq", "transfer.seq", ""},
        {"transfer", "--target-seq", "transfer.target_seq", ""},
        {"transfer", "--target-frame", "transfer.target_frame", ""},
        {"sample", "--count", "sample.count", ""},
        {"interp4d", "--seq-a", "interp4d.seq_a", ""},
        {"interp4d", "--seq-b", "interp4d.seq_b", ""},
        {"interp4d", "--s", "interp4d.s", ""},
        {"interp4d", "--frames", "interp4d.frames", ""},
        {"interp4d", "--scheme", "interp4d.scheme", ""},
        {"dist", "--mesh-a", "dist.mesh_a", ""},
        {"dist", "--mesh-b", "dist.mesh_b", ""},
    };

    for (const std::string& name : vmo::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough(); // global flags may follow the subcommand
        for (Flag& flag : flags) {
            if (flag.command == name) sub->add_option(flag.option, flag.value, flag.key);
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        vmo::RunConfig config;
        if (!config_path.empty()) config = vmo::RunConfig::from_file(config_path);
        config.apply_environment();
        for (const std::string& entry : overrides) {
            const size_t eq = entry.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("--set expects section.key=value, got '" + entry + "'");
            }
            config.set(entry.substr(0, eq), entry.substr(eq + 1));
        }
        if (seed_set) config.set("run.seed", std::to_string(seed));
        if (!out_dir.empty()) config.set("run.out_dir", out_dir);
        for (const Flag& flag : flags) {
            if (!flag.value.empty()) config.set(flag.key, flag.value);
        }

        const std::string command = app.get_subcommands().front()->get_name();
        if (!vmo::run_command(command, config, std::cout)) {
            std::cerr << "error: unknown command '" << command << "'\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
