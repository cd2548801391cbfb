#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "craft/cli.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (default: current)");
    cmd->add_option("--seed", args.seed, "run seed; overrides the config's seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
}

craft::cli::RunContext make_context(const CommonArgs& args) {
    craft::cli::RunContext ctx;
    ctx.config = craft::cli::read_json(args.config_path);
    ctx.out_dir = args.out_dir;
    ctx.seed = args.seed_given ? args.seed : ctx.config.value("seed", std::uint64_t{0});
    return ctx;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Part-silhouette craft proposal pipeline"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* help;
        void (*run)(const craft::cli::RunContext&);
    };
    const Entry entries[] = {
        {"pose", "estimate template pose from a part label map", craft::cli::cmd_pose},
        {"simplify", "complete structure and fit primitives", craft::cli::cmd_simplify},
        {"match", "assign scene objects to model parts", craft::cli::cmd_match},
        {"evaluate", "score proposals against ground truth", craft::cli::cmd_evaluate},
        {"baseline", "exhaustive combination search baseline", craft::cli::cmd_baseline},
        {"pipeline", "run pose, simplify, match, and evaluate in sequence",
         craft::cli::cmd_pipeline},
    };

    CommonArgs args;
    for (const Entry& entry : entries) {
        CLI::App* cmd = app.add_subcommand(entry.name, entry.help);
        add_common(cmd, args);
        cmd->callback([&args, &entry] { entry.run(make_context(args)); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
