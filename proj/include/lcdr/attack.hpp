#ifndef LCDR_ATTACK_HPP
#define LCDR_ATTACK_HPP

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "lcdr/dataset.hpp"
#include "lcdr/model.hpp"
#include "lcdr/relay.hpp"

namespace lcdr {

/// Only the remote channels (rows 3-5) may be perturbed.
inline constexpr std::array<bool, kChannels> kRemoteOnlyMask = {false, false, false,
                                                                true,  true,  true};

struct AttackConfig {
    double epsilon = 0.5;
    int max_iterations = 5;
    int target_label = kLabelFault;

    void validate() const;
};

/// What the attacker needs from the relay side to test the dual criterion.
struct RelayContext {
    RelaySettings settings;
    int pickup_count = 4;
};

struct AttackOutcome {
    bool success = false;
    MeasurementWindow adversarial_window; ///< original window on failure
    int iterations_used = 0;
    bool fooled_model = false;
    bool relay_tripped = false;
    double perturbation_inf_norm_ka = 0.0;
};

/// a = max |x| over all elements.
double amplitude_factor(const Tensor& x);

/// Clip bounds and amplitude derived once from the original sample; the
/// gradient is recomputed at the current iterate.
struct StepContext {
    double amplitude = 0.0;
    double clip_lo = 0.0;
    double clip_hi = 0.0;
};
StepContext make_step_context(const Tensor& original);

/// One masked, amplitude-scaled, clipped gradient-sign step in model space:
/// x' = clip(x + eps * sign(grad_x J(theta, x, y)) * a), remote rows only.
Tensor fgsm_step(Model& model, const Tensor& x, int label, const AttackConfig& cfg,
                 const StepContext& ctx);

/// Single-step convenience overload; bounds and amplitude come from x itself.
Tensor fgsm_step(Model& model, const Tensor& x, int label, const AttackConfig& cfg);

/// Iterated attack on one FDIA sample. Succeeds when the model predicts the
/// target class AND the inverse-scaled window still trips the relay; returns
/// the original sample on failure.
AttackOutcome generate_adversarial(Model& model, const LabeledSample& sample,
                                   const AttackConfig& cfg, const RelayContext& relay);

struct AdversarialSetResult {
    Dataset dataset;
    std::vector<AttackOutcome> outcomes; ///< one per FDIA sample, in set order
    std::size_t n_fdias = 0;
    std::size_t n_success = 0;
};

/// Fault samples pass through verbatim; FDIA samples are replaced by their
/// successful adversarial versions. Labels never change.
AdversarialSetResult build_adversarial_testset(Model& model, const Dataset& test,
                                               const AttackConfig& cfg,
                                               const RelayContext& relay);

/// JSON report: config, totals, and the per-sample outcome records.
void write_attack_report(const AdversarialSetResult& result, const AttackConfig& cfg,
                         const std::string& model_id,
                         const std::filesystem::path& path);

} // namespace lcdr

#endif
