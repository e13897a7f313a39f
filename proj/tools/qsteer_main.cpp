#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qsteer/cli.hpp"
#include "qsteer/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qsteer: bilinear quantum control laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool emit_schedule = false;
    int verify_truncation = 0;

    const std::vector<std::string> names = {"simulate", "pulse",  "steer",
                                            "small-time", "sweep", "disperse",
                                            "findim", "run"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config file (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed override")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_flag("--emit-schedule", emit_schedule,
                      "write the full piecewise-constant schedule");
        sub->add_option("--verify-truncation", verify_truncation,
                        "truncation override for verification/simulation");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string sub = app.get_subcommands().front()->get_name();
    // Subcommand names map onto config tasks.
    std::string task = sub;
    if (sub == "steer") task = "steer-window";
    if (sub == "disperse") task = "dispersal-curve";

    try {
        qsteer::cli::RunOptions opts;
        opts.out_dir = out_dir;
        opts.emit_schedule = emit_schedule;
        if (seed_set) opts.seed = seed;
        if (verify_truncation > 0) opts.verify_truncation = verify_truncation;
        const auto config = qsteer::io::read_json(config_path);
        return qsteer::cli::dispatch(task, config, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
