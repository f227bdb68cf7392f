#ifndef LCDR_PIPELINE_HPP
#define LCDR_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "lcdr/config.hpp"

namespace lcdr {

/// Layout of one experiment directory.
struct PipelinePaths {
    std::filesystem::path out;

    std::filesystem::path train_data() const { return out / "data" / "train"; }
    std::filesystem::path test_data() const { return out / "data" / "test"; }
    std::filesystem::path model(Architecture a) const {
        return out / "models" / (to_string(a) + ".ckpt");
    }
    std::filesystem::path robust_model(Architecture a) const {
        return out / "defense" / (to_string(a) + "_robust.ckpt");
    }
};

/// Per-stage seed streams fanned out from the experiment seed.
std::uint64_t stage_seed_gen(const ExperimentConfig& cfg);
std::uint64_t stage_seed_split(const ExperimentConfig& cfg);
std::uint64_t stage_seed_train(const ExperimentConfig& cfg, Architecture arch);

/// gen: generate the labeled corpus, stratified-split it, and save both
/// halves. Prints a manifest summary.
void run_gen(const ExperimentConfig& cfg);

/// train: fit the scaler on the train split, train one architecture, save
/// the checkpoint.
std::filesystem::path run_train(const ExperimentConfig& cfg, Architecture arch);

struct AttackRunSummary {
    std::string model_id;
    double epsilon = 0.0;
    int iterations = 0;
    std::size_t n_fdias = 0;
    std::size_t n_success = 0;
    double fooling_rate_percent = 0.0;
    std::filesystem::path adversarial_dir;
    std::filesystem::path report_path;
};

/// attack: build the adversarial test set against a checkpoint and write the
/// dataset plus a per-sample report.
AttackRunSummary run_attack(const ExperimentConfig& cfg,
                            const std::filesystem::path& model_path,
                            std::optional<double> epsilon_override = std::nullopt,
                            std::optional<int> iterations_override = std::nullopt);

struct DefenseRunSummary {
    std::string model_id;
    std::size_t augmentation_attempted = 0;
    std::size_t augmentation_added = 0;
    double pre_adv_fdia_recall = 0.0;
    double post_adv_fdia_recall = 0.0;   ///< against the regenerated attack
    double replay_adv_fdia_recall = 0.0; ///< against the pre-defense attack set
    double post_clean_fault_recall = 0.0;
    std::filesystem::path robust_model_path;
    std::filesystem::path report_path;
};

/// defend: adversarially retrain a checkpoint and write the robust
/// checkpoint, the augmented training set, and paired before/after metrics.
DefenseRunSummary run_defend(const ExperimentConfig& cfg,
                             const std::filesystem::path& model_path);

/// eval: metrics report (JSON + CSV) for a checkpoint over a dataset
/// directory; includes the fooling rate when the set carries attack
/// provenance.
MetricsReport run_eval(const ExperimentConfig& cfg,
                       const std::filesystem::path& model_path,
                       const std::filesystem::path& dataset_path);

/// sweep: attack a checkpoint over a grid of (epsilon, iterations) and emit
/// one CSV row per combination.
std::filesystem::path run_sweep(const ExperimentConfig& cfg,
                                const std::filesystem::path& model_path,
                                const std::vector<double>& epsilons,
                                const std::vector<int>& iteration_counts);

} // namespace lcdr

#endif
