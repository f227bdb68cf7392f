// lcdradv: generate the fault/FDIA corpus, train detectors, run the
// gradient-sign attack, harden by adversarial training, and evaluate.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcdr/config.hpp"
#include "lcdr/errors.hpp"
#include "lcdr/pipeline.hpp"

namespace {

// Exit categories, also documented in the README.
enum ExitCode {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kIoError = 3,
    kGenerationError = 4,
    kNumericError = 5,
    kDataError = 6,
};

std::vector<lcdr::Architecture> parse_arch_list(const std::string& arch) {
    using lcdr::Architecture;
    if (arch == "all")
        return {Architecture::Mlp, Architecture::Cnn, Architecture::Lstm,
                Architecture::Resnet};
    return {lcdr::parse_architecture(arch)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"line current differential relay FDIA detection: dataset "
                 "generation, detector training, gradient-sign attacks, and "
                 "adversarial-training defense"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    app.add_option("--config", config_path, "experiment config (json)");
    app.add_option("--seed", seed, "override the experiment seed");
    app.add_option("--out", out_dir, "override the output directory");

    auto* cmd_gen = app.add_subcommand("gen", "generate, split, and save the corpus");

    std::string train_arch = "mlp";
    auto* cmd_train = app.add_subcommand("train", "train a detector");
    cmd_train->add_option("--arch", train_arch, "mlp|cnn|lstm|resnet|all");

    std::string attack_model;
    std::vector<double> attack_epsilons;
    std::optional<int> attack_iters;
    auto* cmd_attack =
        app.add_subcommand("attack", "build the adversarial test set for a checkpoint");
    cmd_attack->add_option("--model", attack_model, "model checkpoint path")->required();
    cmd_attack->add_option("--epsilon", attack_epsilons, "perturbation magnitude");
    cmd_attack->add_option("--iters", attack_iters, "gradient-sign iterations");

    std::string defend_model;
    auto* cmd_defend =
        app.add_subcommand("defend", "adversarially retrain a checkpoint");
    cmd_defend->add_option("--model", defend_model, "model checkpoint path")->required();

    std::string eval_model, eval_dataset;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    cmd_eval->add_option("--model", eval_model, "model checkpoint path")->required();
    cmd_eval->add_option("--dataset", eval_dataset, "dataset directory")->required();

    std::string sweep_model;
    std::vector<double> sweep_epsilons;
    std::vector<int> sweep_iters;
    auto* cmd_sweep =
        app.add_subcommand("sweep", "fooling-rate sweep over epsilon / iterations");
    cmd_sweep->add_option("--model", sweep_model, "model checkpoint path")->required();
    cmd_sweep->add_option("--epsilon", sweep_epsilons, "epsilon values (repeatable)");
    cmd_sweep->add_option("--iters", sweep_iters, "iteration counts (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        lcdr::ExperimentConfig cfg = config_path.empty()
                                         ? lcdr::default_config()
                                         : lcdr::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.out_dir = *out_dir;
        cfg.validate();

        if (cmd_gen->parsed()) {
            lcdr::run_gen(cfg);
        } else if (cmd_train->parsed()) {
            for (lcdr::Architecture arch : parse_arch_list(train_arch))
                lcdr::run_train(cfg, arch);
        } else if (cmd_attack->parsed()) {
            if (attack_epsilons.size() > 1)
                throw lcdr::ParameterError(
                    "attack takes one --epsilon; use sweep for several");
            std::optional<double> eps;
            if (!attack_epsilons.empty()) eps = attack_epsilons.front();
            lcdr::run_attack(cfg, attack_model, eps, attack_iters);
        } else if (cmd_defend->parsed()) {
            lcdr::run_defend(cfg, defend_model);
        } else if (cmd_eval->parsed()) {
            lcdr::run_eval(cfg, eval_model, eval_dataset);
        } else if (cmd_sweep->parsed()) {
            if (sweep_epsilons.empty())
                sweep_epsilons = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
            lcdr::run_sweep(cfg, sweep_model, sweep_epsilons, sweep_iters);
        }
        return kOk;
    } catch (const lcdr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const lcdr::ParameterError& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return kConfigError;
    } catch (const lcdr::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kIoError;
    } catch (const lcdr::GenerationError& e) {
        std::fprintf(stderr, "generation error: %s\n", e.what());
        return kGenerationError;
    } catch (const lcdr::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kNumericError;
    } catch (const lcdr::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kDataError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
}
