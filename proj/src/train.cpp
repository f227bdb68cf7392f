#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lcdr/errors.hpp"
#include "lcdr/model.hpp"
#include "lcdr/rng.hpp"

namespace lcdr {

namespace {

struct AdamState {
    std::vector<std::vector<double>> m, v;
    long t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    explicit AdamState(const std::vector<Tensor*>& params) {
        for (const Tensor* p : params) {
            m.emplace_back(p->size(), 0.0);
            v.emplace_back(p->size(), 0.0);
        }
    }

    void step(std::vector<Tensor*>& params, const std::vector<Tensor*>& grads, double lr) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            double* w = params[i]->data.data();
            const double* g = grads[i]->data.data();
            double* mi = m[i].data();
            double* vi = v[i].data();
            for (std::size_t j = 0; j < params[i]->size(); ++j) {
                mi[j] = beta1 * mi[j] + (1.0 - beta1) * g[j];
                vi[j] = beta2 * vi[j] + (1.0 - beta2) * g[j] * g[j];
                const double mhat = mi[j] / bc1;
                const double vhat = vi[j] / bc2;
                w[j] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }
};

void sgd_step(std::vector<Tensor*>& params, const std::vector<Tensor*>& grads, double lr) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        double* w = params[i]->data.data();
        const double* g = grads[i]->data.data();
        for (std::size_t j = 0; j < params[i]->size(); ++j) w[j] -= lr * g[j];
    }
}

} // namespace

TrainHistory train(Model& model, const Dataset& train_set, const TrainConfig& cfg) {
    cfg.validate();
    if (!model.has_scaler) throw ParameterError("fit and attach a scaler before training");
    TrainHistory history;
    if (cfg.epochs == 0) return history;
    if (train_set.size() == 0) throw ParameterError("training set is empty");

    // scale once up front
    std::vector<Tensor> inputs;
    std::vector<int> labels;
    inputs.reserve(train_set.size());
    labels.reserve(train_set.size());
    for (const auto& s : train_set.samples) {
        inputs.push_back(model.scaler.apply(s.window));
        labels.push_back(s.label);
    }

    auto params = model.parameters();
    auto grads = model.gradients();
    AdamState adam(params);
    Rng rng(derive_seed(cfg.seed, 0x747261696eULL));

    std::vector<std::size_t> order(inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const std::size_t n = inputs.size();
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(order, rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            const double inv_batch = 1.0 / static_cast<double>(stop - start);
            model.zero_grad();
            for (std::size_t k = start; k < stop; ++k) {
                const std::size_t idx = order[k];
                const double p = model.forward(inputs[idx]);
                const int y = labels[idx];
                loss_sum += bce_loss(p, y);
                correct += ((p >= 0.5 ? 1 : 0) == y) ? 1 : 0;
                model.backward_from_logit((p - static_cast<double>(y)) * inv_batch);
            }
            if (cfg.optimizer == TrainConfig::Optimizer::Adam)
                adam.step(params, grads, cfg.learning_rate);
            else
                sgd_step(params, grads, cfg.learning_rate);
        }
        const double mean_loss = loss_sum / static_cast<double>(n);
        if (!std::isfinite(mean_loss))
            throw NumericError("training loss became non-finite at epoch " +
                               std::to_string(epoch) + " (" + to_string(model.architecture) +
                               ")");
        const double acc = static_cast<double>(correct) / static_cast<double>(n);
        history.epoch_loss.push_back(mean_loss);
        history.epoch_accuracy.push_back(acc);
        if (cfg.verbose)
            std::printf("epoch %3d/%d  loss %.6f  acc %.4f\n", epoch, cfg.epochs, mean_loss, acc);
    }
    return history;
}

} // namespace lcdr
