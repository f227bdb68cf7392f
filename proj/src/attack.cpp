#include "lcdr/attack.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "lcdr/errors.hpp"

namespace lcdr {

void AttackConfig::validate() const {
    if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be >= 0");
    if (max_iterations < 1) throw ParameterError("max_iterations must be >= 1");
    if (target_label != kLabelFault)
        throw ParameterError("target label is the fault class");
}

double amplitude_factor(const Tensor& x) {
    if (x.size() == 0) throw ParameterError("amplitude_factor of empty tensor");
    double a = 0.0;
    for (double v : x.data) a = std::max(a, std::abs(v));
    return a;
}

StepContext make_step_context(const Tensor& original) {
    StepContext ctx;
    ctx.amplitude = amplitude_factor(original);
    ctx.clip_lo = original.data.empty() ? 0.0 : original[0];
    ctx.clip_hi = ctx.clip_lo;
    for (double v : original.data) {
        ctx.clip_lo = std::min(ctx.clip_lo, v);
        ctx.clip_hi = std::max(ctx.clip_hi, v);
    }
    return ctx;
}

Tensor fgsm_step(Model& model, const Tensor& x, int label, const AttackConfig& cfg,
                 const StepContext& ctx) {
    cfg.validate();
    GradResult grad = backward(model, x, label);
    model.zero_grad(); // parameter gradients are a side effect here

    Tensor out = x;
    const std::size_t t_len = x.shape[1];
    for (int ch = 0; ch < kChannels; ++ch) {
        if (!kRemoteOnlyMask[ch]) continue;
        for (std::size_t t = 0; t < t_len; ++t) {
            const double g = grad.input_grad.at(ch, t);
            const double sign = (g > 0.0) - (g < 0.0);
            double v = out.at(ch, t) + cfg.epsilon * sign * ctx.amplitude;
            v = std::min(std::max(v, ctx.clip_lo), ctx.clip_hi);
            out.at(ch, t) = v;
        }
    }
    return out;
}

Tensor fgsm_step(Model& model, const Tensor& x, int label, const AttackConfig& cfg) {
    return fgsm_step(model, x, label, cfg, make_step_context(x));
}

namespace {

/// Physical-space adversarial window: local rows copied verbatim from the
/// source sample, remote rows inverse-scaled from model space.
MeasurementWindow to_physical(const Tensor& adv, const LabeledSample& source,
                              const Scaler& scaler) {
    MeasurementWindow w = scaler.invert(adv, source.window);
    for (int ch = 0; ch < kRemoteOffset; ++ch)
        for (int t = 0; t < w.length; ++t) w.at(ch, t) = source.window.at(ch, t);
    return w;
}

double inf_norm_diff(const MeasurementWindow& a, const MeasurementWindow& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
    return m;
}

} // namespace

AttackOutcome generate_adversarial(Model& model, const LabeledSample& sample,
                                   const AttackConfig& cfg, const RelayContext& relay) {
    cfg.validate();
    if (sample.label != kLabelFdia)
        throw ParameterError("adversarial generation targets FDIA samples only");
    if (!model.has_scaler) throw ParameterError("model has no scaler fitted");

    AttackOutcome outcome;
    outcome.adversarial_window = sample.window;

    const Tensor x0 = model.scaler.apply(sample.window);
    if (predict(model, x0) == cfg.target_label) {
        // already misclassified as a fault; nothing to perturb
        outcome.fooled_model = true;
        outcome.relay_tripped =
            trip_check(sample.window, relay.settings, relay.pickup_count).tripped;
        outcome.success = outcome.fooled_model && outcome.relay_tripped;
        return outcome;
    }

    const StepContext ctx = make_step_context(x0);
    Tensor x = x0;
    for (int itr = 1; itr <= cfg.max_iterations; ++itr) {
        x = fgsm_step(model, x, sample.label, cfg, ctx);
        outcome.iterations_used = itr;
        outcome.fooled_model = predict(model, x) == cfg.target_label;
        if (!outcome.fooled_model) continue;
        MeasurementWindow candidate = to_physical(x, sample, model.scaler);
        outcome.relay_tripped =
            trip_check(candidate, relay.settings, relay.pickup_count).tripped;
        if (outcome.relay_tripped) {
            outcome.success = true;
            outcome.adversarial_window = std::move(candidate);
            outcome.perturbation_inf_norm_ka =
                inf_norm_diff(outcome.adversarial_window, sample.window);
            return outcome;
        }
    }
    // failure: report the final iterate's predicate states, return the original
    if (outcome.fooled_model && outcome.iterations_used > 0) {
        MeasurementWindow candidate = to_physical(x, sample, model.scaler);
        outcome.relay_tripped =
            trip_check(candidate, relay.settings, relay.pickup_count).tripped;
    }
    outcome.success = false;
    outcome.adversarial_window = sample.window;
    outcome.perturbation_inf_norm_ka = 0.0;
    return outcome;
}

AdversarialSetResult build_adversarial_testset(Model& model, const Dataset& test,
                                               const AttackConfig& cfg,
                                               const RelayContext& relay) {
    AdversarialSetResult result;
    result.dataset.manifest = test.manifest;
    result.dataset.samples.reserve(test.size());
    std::vector<AttackProvenance> provenance;
    provenance.reserve(test.size());

    for (const auto& sample : test.samples) {
        if (sample.label != kLabelFdia) {
            result.dataset.samples.push_back(sample);
            provenance.push_back({false, 0, 0.0});
            continue;
        }
        ++result.n_fdias;
        AttackOutcome outcome = generate_adversarial(model, sample, cfg, relay);
        LabeledSample adv = sample;
        if (outcome.success) {
            ++result.n_success;
            adv.window = outcome.adversarial_window;
        }
        provenance.push_back({outcome.success, outcome.iterations_used, cfg.epsilon});
        result.dataset.samples.push_back(std::move(adv));
        result.outcomes.push_back(std::move(outcome));
    }
    result.dataset.manifest.attack = std::move(provenance);
    result.dataset.refresh_counts();
    return result;
}

void write_attack_report(const AdversarialSetResult& result, const AttackConfig& cfg,
                         const std::string& model_id,
                         const std::filesystem::path& path) {
    nlohmann::json report;
    report["model"] = model_id;
    report["epsilon"] = cfg.epsilon;
    report["max_iterations"] = cfg.max_iterations;
    report["n_fdias"] = result.n_fdias;
    report["n_success"] = result.n_success;
    report["success_fraction"] =
        result.n_fdias ? static_cast<double>(result.n_success) / result.n_fdias : 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
        const AttackOutcome& o = result.outcomes[i];
        rows.push_back({{"fdia_index", i},
                        {"success", o.success},
                        {"iterations", o.iterations_used},
                        {"fooled_model", o.fooled_model},
                        {"relay_tripped", o.relay_tripped},
                        {"perturbation_inf_norm_ka", o.perturbation_inf_norm_ka}});
    }
    report["samples"] = std::move(rows);
    std::ofstream os(path);
    if (!os) throw IoError("cannot write attack report: " + path.string());
    os << report.dump(2) << "\n";
}

} // namespace lcdr
