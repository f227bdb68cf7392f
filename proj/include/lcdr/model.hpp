#ifndef LCDR_MODEL_HPP
#define LCDR_MODEL_HPP

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "lcdr/dataset.hpp"
#include "lcdr/layers.hpp"
#include "lcdr/tensor.hpp"

namespace lcdr {

enum class Architecture { Mlp, Cnn, Lstm, Resnet };

Architecture parse_architecture(const std::string& s);
std::string to_string(Architecture a);

struct TrainConfig {
    int epochs = 30;
    int batch_size = 32;
    double learning_rate = 1e-3;
    enum class Optimizer { Sgd, Adam } optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;
    bool verbose = true;

    void validate() const;
};

/// Binary classifier over [6,T] windows: a layer stack producing one logit,
/// a terminal sigmoid, and the input-space scaler it was trained with.
class Model {
public:
    Architecture architecture = Architecture::Mlp;
    int input_length = 0;
    std::vector<std::unique_ptr<Layer>> stack;
    Scaler scaler;
    bool has_scaler = false;

    /// Probability of the FDIA class, in (0,1). Caches the forward tape.
    double forward(const Tensor& x);
    double logit(const Tensor& x);

    /// Backpropagates d(loss)/d(logit) through the stack; parameter
    /// gradients accumulate into the layers. Returns d(loss)/d(input).
    Tensor backward_from_logit(double grad_logit);

    void zero_grad();
    std::vector<Tensor*> parameters();
    std::vector<Tensor*> gradients();
    std::size_t parameter_count();
};

/// Builds one of the four fixed architectures with seeded initialization.
Model make_model(Architecture arch, int input_length, std::uint64_t seed);

/// Binary cross-entropy with probability clamped to [1e-7, 1 - 1e-7].
double bce_loss(double prob, int label);

struct GradResult {
    double prob = 0.0;
    double loss = 0.0;
    Tensor input_grad;
};

/// Forward + reverse pass of bce_loss(forward(x), label) for one sample.
/// Layer gradients accumulate; input gradient is returned.
GradResult backward(Model& model, const Tensor& x, int label);

/// Threshold 0.5; ties classify as FDIA.
int predict(Model& model, const Tensor& x);
std::vector<int> predict_batch(Model& model, const Dataset& ds);

struct TrainHistory {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_accuracy;
};

/// Minimizes mean BCE with mini-batch SGD/Adam; deterministic in cfg.seed.
/// Logs one line per epoch when cfg.verbose and returns the epoch curves.
TrainHistory train(Model& model, const Dataset& train_set, const TrainConfig& cfg);

/// Versioned little-endian binary checkpoint (architecture, parameters,
/// scaler); save/load round-trips bit-exactly.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

} // namespace lcdr

#endif
