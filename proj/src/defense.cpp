#include "lcdr/defense.hpp"

#include <cstdio>

#include "lcdr/errors.hpp"

namespace lcdr {

void DefenseConfig::validate() const {
    if (retrain_epochs < 1) throw ParameterError("retrain_epochs must be >= 1");
    if (epsilons.empty()) throw ParameterError("defense needs at least one epsilon");
    for (double e : epsilons)
        if (!(e >= 0.0)) throw ParameterError("defense epsilons must be >= 0");
    attack.validate();
}

DefenseResult adversarial_training(Model& model, const Dataset& train_set,
                                   const DefenseConfig& cfg, const RelayContext& relay) {
    cfg.validate();
    if (!model.has_scaler) throw ParameterError("model has no scaler fitted");

    DefenseResult result;
    result.augmented_train = train_set;
    std::vector<AttackProvenance> provenance(train_set.size(), AttackProvenance{});

    for (const auto& sample : train_set.samples) {
        if (sample.label != kLabelFdia) continue;
        // Only FDIA samples the model currently catches are worth hardening.
        if (predict(model, model.scaler.apply(sample.window)) != kLabelFdia) continue;
        for (double eps : cfg.epsilons) {
            AttackConfig per_eps = cfg.attack;
            per_eps.epsilon = eps;
            ++result.attempted;
            AttackOutcome outcome = generate_adversarial(model, sample, per_eps, relay);
            if (!outcome.success || outcome.iterations_used == 0) continue;
            ++result.succeeded;
            LabeledSample adv;
            adv.window = std::move(outcome.adversarial_window);
            adv.label = kLabelFdia;
            adv.scenario = sample.scenario;
            result.augmented_train.samples.push_back(std::move(adv));
            provenance.push_back({true, outcome.iterations_used, eps});
        }
    }
    result.augmented_train.manifest.attack = std::move(provenance);
    result.augmented_train.refresh_counts();

    if (result.succeeded == 0)
        std::fprintf(stderr,
                     "warning: no adversarial training samples were generated; "
                     "retraining on the original data\n");

    TrainConfig retrain = cfg.retrain;
    retrain.epochs = cfg.retrain_epochs;
    train(model, result.augmented_train, retrain);
    return result;
}

std::pair<MetricsReport, MetricsReport> evaluate_defense(Model& model,
                                                         const Dataset& clean_test,
                                                         const Dataset& adv_test,
                                                         const RelayContext& relay) {
    if (adv_test.size() == 0) throw ParameterError("adversarial test set is empty");
    if (clean_test.size() == 0) throw ParameterError("clean test set is empty");
    // Integrity: adversarial windows must still be relay-triggering events.
    for (const auto& sample : adv_test.samples)
        if (!trip_check(sample.window, relay.settings, relay.pickup_count).tripped)
            throw DataError("adversarial test sample does not trip the relay");

    std::vector<int> clean_labels, adv_labels;
    for (const auto& s : clean_test.samples) clean_labels.push_back(s.label);
    for (const auto& s : adv_test.samples) adv_labels.push_back(s.label);

    MetricsReport clean = classification_metrics(predict_batch(model, clean_test), clean_labels);
    MetricsReport adv = classification_metrics(predict_batch(model, adv_test), adv_labels);
    return {std::move(clean), std::move(adv)};
}

} // namespace lcdr
