#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "loadgen/errors.hpp"
#include "loadgen/pipeline/commands.hpp"
#include "loadgen/pipeline/run_config.hpp"

namespace {

using namespace loadgen;

void print_error(const std::string& command, const std::string& type, const std::string& message) {
    std::cerr << nlohmann::json{{"error", type}, {"command", command}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional VAE load-profile pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string noise = "on";
    std::string mode = "match-training";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Master seed (overrides the config)");
        sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    };
    auto* simulate = app.add_subcommand("simulate", "Write a synthetic smart-meter CSV");
    auto* prep = app.add_subcommand("prep", "Turn the meter CSV into the prepared profile set");
    auto* train = app.add_subcommand("train", "Train the CVAE and write a checkpoint");
    auto* generate = app.add_subcommand("generate", "Generate profiles from a checkpoint");
    auto* evaluate = app.add_subcommand("evaluate", "Compare train, test and generated profiles");
    for (auto* sub : {simulate, prep, train, generate, evaluate}) add_common(sub);
    generate->add_option("--noise", noise, "Add decoder noise")->check(CLI::IsMember({"on", "off"}));
    generate->add_option("--mode", mode, "match-training | class-sample:<small|medium|large>");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("", "UsageError", e.what());
        return 2;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    try {
        pipeline::RunConfig config = config_path.empty() ? pipeline::RunConfig{} : pipeline::load_run_config(config_path);
        if (seed) config.seed = *seed;
        if (!out_dir.empty()) config.out_dir = out_dir;
        config.validate();

        if (command == "simulate") pipeline::cmd_simulate(config, std::cout);
        else if (command == "prep") pipeline::cmd_prep(config, std::cout);
        else if (command == "train") pipeline::cmd_train(config, std::cout);
        else if (command == "generate")
            pipeline::cmd_generate(config, pipeline::parse_generate_mode(mode, noise == "on"), std::cout);
        else if (command == "evaluate") pipeline::cmd_evaluate(config, std::cout);
    } catch (const ShapeError& e) {
        print_error(command, "ShapeError", e.what());
        return 1;
    } catch (const NumericError& e) {
        print_error(command, "NumericError", e.what());
        return 1;
    } catch (const DataError& e) {
        print_error(command, "DataError", e.what());
        return 1;
    } catch (const FormatError& e) {
        print_error(command, "FormatError", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(command, "Error", e.what());
        return 1;
    }
    return 0;
}
