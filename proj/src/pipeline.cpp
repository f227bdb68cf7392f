#include "lcdr/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lcdr/errors.hpp"
#include "lcdr/rng.hpp"

namespace lcdr {

namespace {

constexpr std::uint64_t kGenStage = 0x67656eULL;
constexpr std::uint64_t kSplitStage = 0x73706c6974ULL;
constexpr std::uint64_t kTrainStage = 0x747261696eULL;

std::string format_epsilon(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", eps);
    return buf;
}

double fdia_recall_or_zero(const MetricsReport& r) {
    return r.recall.value_or(0.0);
}

} // namespace

std::uint64_t stage_seed_gen(const ExperimentConfig& cfg) {
    return derive_seed(cfg.seed, kGenStage);
}

std::uint64_t stage_seed_split(const ExperimentConfig& cfg) {
    return derive_seed(cfg.seed, kSplitStage);
}

std::uint64_t stage_seed_train(const ExperimentConfig& cfg, Architecture arch) {
    return derive_seed(derive_seed(cfg.seed, kTrainStage),
                       static_cast<std::uint64_t>(arch) + 1);
}

void run_gen(const ExperimentConfig& cfg) {
    cfg.validate();
    const PipelinePaths paths{cfg.out_dir};
    Dataset full = generate_dataset(cfg.generation, cfg.system, cfg.relay,
                                    stage_seed_gen(cfg), cfg.pickup_count);
    auto [train_set, test_set] = split(full, cfg.test_fraction, stage_seed_split(cfg));
    save_dataset(train_set, paths.train_data());
    save_dataset(test_set, paths.test_data());
    std::printf("generated %zu samples (%zu fault, %zu fdia)\n", full.size(),
                full.manifest.fault_count, full.manifest.fdia_count);
    std::printf("train: %zu (%zu fault, %zu fdia) -> %s\n", train_set.size(),
                train_set.manifest.fault_count, train_set.manifest.fdia_count,
                paths.train_data().c_str());
    std::printf("test:  %zu (%zu fault, %zu fdia) -> %s\n", test_set.size(),
                test_set.manifest.fault_count, test_set.manifest.fdia_count,
                paths.test_data().c_str());
}

std::filesystem::path run_train(const ExperimentConfig& cfg, Architecture arch) {
    cfg.validate();
    const PipelinePaths paths{cfg.out_dir};
    Dataset train_set = load_dataset(paths.train_data());

    Model model = make_model(arch, train_set.manifest.window_length,
                             stage_seed_train(cfg, arch));
    model.scaler = fit_scaler(train_set);
    model.has_scaler = true;

    TrainConfig tc = cfg.train;
    tc.seed = stage_seed_train(cfg, arch);
    std::printf("training %s on %zu samples\n", to_string(arch).c_str(), train_set.size());
    train(model, train_set, tc);

    std::filesystem::create_directories(paths.model(arch).parent_path());
    save_model(model, paths.model(arch));
    std::printf("checkpoint -> %s\n", paths.model(arch).c_str());
    return paths.model(arch);
}

AttackRunSummary run_attack(const ExperimentConfig& cfg,
                            const std::filesystem::path& model_path,
                            std::optional<double> epsilon_override,
                            std::optional<int> iterations_override) {
    cfg.validate();
    const PipelinePaths paths{cfg.out_dir};
    Model model = load_model(model_path);
    Dataset test_set = load_dataset(paths.test_data());

    AttackConfig attack_cfg = cfg.attack;
    if (epsilon_override) attack_cfg.epsilon = *epsilon_override;
    if (iterations_override) attack_cfg.max_iterations = *iterations_override;
    attack_cfg.validate();
    const RelayContext relay{cfg.relay, cfg.pickup_count};

    AdversarialSetResult result =
        build_adversarial_testset(model, test_set, attack_cfg, relay);

    AttackRunSummary summary;
    summary.model_id = to_string(model.architecture);
    summary.epsilon = attack_cfg.epsilon;
    summary.iterations = attack_cfg.max_iterations;
    summary.n_fdias = result.n_fdias;
    summary.n_success = result.n_success;
    summary.fooling_rate_percent = fooling_rate(result.outcomes, result.n_fdias);

    const std::string tag = summary.model_id + "_eps" + format_epsilon(attack_cfg.epsilon);
    summary.adversarial_dir = paths.out / "attacks" / tag;
    summary.report_path = paths.out / "attacks" / (tag + "_report.json");
    std::filesystem::create_directories(summary.adversarial_dir.parent_path());
    save_dataset(result.dataset, summary.adversarial_dir);
    write_attack_report(result, attack_cfg, summary.model_id, summary.report_path);

    std::printf("attack %s eps=%s iters=%d: %zu/%zu successful (FR %.2f%%)\n",
                summary.model_id.c_str(), format_epsilon(attack_cfg.epsilon).c_str(),
                attack_cfg.max_iterations, summary.n_success, summary.n_fdias,
                summary.fooling_rate_percent);
    return summary;
}

DefenseRunSummary run_defend(const ExperimentConfig& cfg,
                             const std::filesystem::path& model_path) {
    cfg.validate();
    const PipelinePaths paths{cfg.out_dir};
    Model model = load_model(model_path);
    Dataset train_set = load_dataset(paths.train_data());
    Dataset test_set = load_dataset(paths.test_data());
    const RelayContext relay{cfg.relay, cfg.pickup_count};

    std::vector<int> test_labels;
    for (const auto& s : test_set.samples) test_labels.push_back(s.label);

    // pre-defense numbers against the attack crafted for the base model
    AdversarialSetResult pre_attack =
        build_adversarial_testset(model, test_set, cfg.attack, relay);
    MetricsReport pre_clean =
        classification_metrics(predict_batch(model, test_set), test_labels);
    MetricsReport pre_adv =
        classification_metrics(predict_batch(model, pre_attack.dataset), test_labels);

    DefenseConfig defense_cfg = cfg.defense;
    defense_cfg.attack = cfg.attack;
    defense_cfg.retrain = cfg.train;
    defense_cfg.retrain.seed = derive_seed(stage_seed_train(cfg, model.architecture),
                                           0x726f62757374ULL);
    DefenseResult defense = adversarial_training(model, train_set, defense_cfg, relay);

    // adaptive re-attack against the hardened model, plus replay of the old set
    AdversarialSetResult post_attack =
        build_adversarial_testset(model, test_set, cfg.attack, relay);
    auto [post_clean, post_adv] =
        evaluate_defense(model, test_set, post_attack.dataset, relay);
    MetricsReport replay_adv =
        classification_metrics(predict_batch(model, pre_attack.dataset), test_labels);

    DefenseRunSummary summary;
    summary.model_id = to_string(model.architecture);
    summary.augmentation_attempted = defense.attempted;
    summary.augmentation_added = defense.succeeded;
    summary.pre_adv_fdia_recall = fdia_recall_or_zero(pre_adv);
    summary.post_adv_fdia_recall = fdia_recall_or_zero(post_adv);
    summary.replay_adv_fdia_recall = fdia_recall_or_zero(replay_adv);
    summary.post_clean_fault_recall = post_clean.fault_recall().value_or(0.0);

    const auto defense_dir = paths.out / "defense";
    std::filesystem::create_directories(defense_dir);
    summary.robust_model_path = paths.robust_model(model.architecture);
    save_model(model, summary.robust_model_path);
    save_dataset(defense.augmented_train,
                 defense_dir / (summary.model_id + "_augmented_train"));

    nlohmann::json report;
    report["model"] = summary.model_id;
    report["augmentation"] = {{"attempted", defense.attempted},
                              {"added", defense.succeeded},
                              {"epsilons", defense_cfg.epsilons},
                              {"retrain_epochs", defense_cfg.retrain_epochs}};
    auto metrics_json = [](const MetricsReport& r) {
        nlohmann::json j;
        j["confusion"] = {{"tp", r.tp}, {"tn", r.tn}, {"fp", r.fp}, {"fn", r.fn}};
        j["accuracy"] = r.accuracy;
        if (r.precision) j["precision"] = *r.precision;
        if (r.recall) j["recall"] = *r.recall;
        if (r.f1) j["f1"] = *r.f1;
        return j;
    };
    report["pre_defense"] = {{"clean", metrics_json(pre_clean)},
                             {"adversarial", metrics_json(pre_adv)},
                             {"attack_success",
                              {{"n_fdias", pre_attack.n_fdias},
                               {"n_success", pre_attack.n_success}}}};
    report["post_defense"] = {{"clean", metrics_json(post_clean)},
                              {"adversarial_regenerated", metrics_json(post_adv)},
                              {"adversarial_replayed", metrics_json(replay_adv)},
                              {"attack_success",
                               {{"n_fdias", post_attack.n_fdias},
                                {"n_success", post_attack.n_success}}}};
    summary.report_path = defense_dir / (summary.model_id + "_defense_report.json");
    std::ofstream os(summary.report_path);
    if (!os) throw IoError("cannot write defense report");
    os << report.dump(2) << "\n";

    std::printf("defense %s: adv FDIA recall %.4f -> %.4f (replay %.4f), "
                "clean fault recall %.4f, +%zu samples\n",
                summary.model_id.c_str(), summary.pre_adv_fdia_recall,
                summary.post_adv_fdia_recall, summary.replay_adv_fdia_recall,
                summary.post_clean_fault_recall, summary.augmentation_added);
    return summary;
}

MetricsReport run_eval(const ExperimentConfig& cfg,
                       const std::filesystem::path& model_path,
                       const std::filesystem::path& dataset_path) {
    cfg.validate();
    const PipelinePaths paths{cfg.out_dir};
    Model model = load_model(model_path);
    Dataset ds = load_dataset(dataset_path);

    std::vector<int> labels;
    for (const auto& s : ds.samples) labels.push_back(s.label);
    const std::vector<int> predictions = predict_batch(model, ds);
    MetricsReport report = classification_metrics(predictions, labels);

    if (ds.manifest.attack) {
        // Fooling rate over the stored adversarial set: FDIA samples
        // predicted as faults whose windows still trip the relay.
        std::size_t n_fdias = 0, fooled = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (labels[i] != kLabelFdia) continue;
            ++n_fdias;
            if (predictions[i] != kLabelFault) continue;
            if (trip_check(ds.samples[i].window, cfg.relay, cfg.pickup_count).tripped)
                ++fooled;
        }
        if (n_fdias > 0)
            report.fooling_rate = 100.0 * static_cast<double>(fooled) / n_fdias;
    }

    report.metadata["model"] = to_string(model.architecture);
    report.metadata["dataset"] = dataset_path.filename().string();
    report.metadata["epsilon"] = "";
    report.metadata["iterations"] = "";

    const auto eval_dir = paths.out / "eval";
    std::filesystem::create_directories(eval_dir);
    const std::string stem =
        to_string(model.architecture) + "_" + dataset_path.filename().string();
    emit_report(report, eval_dir / (stem + "_metrics.json"), ReportFormat::Json);
    emit_report(report, eval_dir / (stem + "_metrics.csv"), ReportFormat::Csv);

    std::printf("eval %s on %s: acc %.4f", to_string(model.architecture).c_str(),
                dataset_path.filename().c_str(), report.accuracy);
    if (report.fooling_rate) std::printf(", FR %.2f%%", *report.fooling_rate);
    std::printf("\n");
    return report;
}

std::filesystem::path run_sweep(const ExperimentConfig& cfg,
                                const std::filesystem::path& model_path,
                                const std::vector<double>& epsilons,
                                const std::vector<int>& iteration_counts) {
    cfg.validate();
    if (epsilons.empty()) throw ParameterError("sweep needs at least one epsilon");
    const PipelinePaths paths{cfg.out_dir};
    Model model = load_model(model_path);
    Dataset test_set = load_dataset(paths.test_data());
    const RelayContext relay{cfg.relay, cfg.pickup_count};
    const std::vector<int> iters =
        iteration_counts.empty() ? std::vector<int>{cfg.attack.max_iterations}
                                 : iteration_counts;

    const auto sweep_dir = paths.out / "sweeps";
    std::filesystem::create_directories(sweep_dir);
    const auto csv_path =
        sweep_dir / (to_string(model.architecture) + "_fr_sweep.csv");
    std::ofstream os(csv_path);
    if (!os) throw IoError("cannot write sweep csv");
    os << "model,epsilon,iterations,n_fdias,n_success,fooling_rate_percent\n";
    os.precision(17);
    for (int n_itr : iters) {
        for (double eps : epsilons) {
            AttackConfig attack_cfg = cfg.attack;
            attack_cfg.epsilon = eps;
            attack_cfg.max_iterations = n_itr;
            AdversarialSetResult result =
                build_adversarial_testset(model, test_set, attack_cfg, relay);
            const double fr = fooling_rate(result.outcomes, result.n_fdias);
            os << to_string(model.architecture) << ',' << eps << ',' << n_itr << ','
               << result.n_fdias << ',' << result.n_success << ',' << fr << "\n";
            std::printf("sweep %s eps=%s iters=%d: FR %.2f%%\n",
                        to_string(model.architecture).c_str(),
                        format_epsilon(eps).c_str(), n_itr, fr);
        }
    }
    return csv_path;
}

} // namespace lcdr
