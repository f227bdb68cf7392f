#ifndef LCDR_DEFENSE_HPP
#define LCDR_DEFENSE_HPP

#include <utility>
#include <vector>

#include "lcdr/attack.hpp"
#include "lcdr/metrics.hpp"
#include "lcdr/model.hpp"

namespace lcdr {

struct DefenseConfig {
    int retrain_epochs = 10;
    /// Perturbation magnitudes used to craft the training adversarials;
    /// successes for every value are pooled into the augmented set.
    std::vector<double> epsilons{0.1, 0.3, 0.5};
    AttackConfig attack;   ///< iteration budget and target class
    TrainConfig retrain;   ///< optimizer settings for the extra epochs

    void validate() const;
};

struct DefenseResult {
    Dataset augmented_train;
    std::size_t attempted = 0;  ///< eligible (correctly classified FDIA) attempts
    std::size_t succeeded = 0;  ///< adversarial samples appended
};

/// Augments the training set with successful adversarial FDIA samples
/// crafted against the current model, then continues training the model on
/// the augmented set for retrain_epochs. The model is updated in place.
DefenseResult adversarial_training(Model& model, const Dataset& train_set,
                                   const DefenseConfig& cfg, const RelayContext& relay);

/// Clean-set and adversarial-set metrics for the same model. The adversarial
/// set must be freshly built against this model.
std::pair<MetricsReport, MetricsReport> evaluate_defense(Model& model,
                                                         const Dataset& clean_test,
                                                         const Dataset& adv_test,
                                                         const RelayContext& relay);

} // namespace lcdr

#endif
