#ifndef LCDR_LAYERS_HPP
#define LCDR_LAYERS_HPP

#include <memory>
#include <string>
#include <vector>

#include "lcdr/rng.hpp"
#include "lcdr/tensor.hpp"

namespace lcdr {

/// One differentiable stage. forward() caches whatever backward() needs;
/// backward() consumes the upstream gradient, accumulates parameter
/// gradients, and returns the gradient with respect to its input.
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual std::vector<Tensor*> parameters() { return {}; }
    virtual std::vector<Tensor*> gradients() { return {}; }
    virtual std::string name() const = 0;

    void zero_grad() {
        for (Tensor* g : gradients()) g->fill(0.0);
    }
};

/// [in] -> [out], y = W x + b.
class Dense : public Layer {
public:
    Dense(std::size_t in, std::size_t out, Rng& rng);
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Tensor*> parameters() override { return {&weight, &bias}; }
    std::vector<Tensor*> gradients() override { return {&grad_weight, &grad_bias}; }
    std::string name() const override { return "dense"; }

    Tensor weight, bias, grad_weight, grad_bias;

private:
    std::size_t in_, out_;
    Tensor x_;
};

class Relu : public Layer {
public:
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string name() const override { return "relu"; }

private:
    Tensor x_;
};

class Sigmoid : public Layer {
public:
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string name() const override { return "sigmoid"; }

private:
    Tensor y_;
};

/// [C,L] -> [C*L].
class Flatten : public Layer {
public:
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string name() const override { return "flatten"; }

private:
    std::vector<std::size_t> in_shape_;
};

/// [Cin,L] -> [Cout,L], zero-padded 'same' convolution, odd kernel.
class Conv1d : public Layer {
public:
    Conv1d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, Rng& rng);
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Tensor*> parameters() override { return {&weight, &bias}; }
    std::vector<Tensor*> gradients() override { return {&grad_weight, &grad_bias}; }
    std::string name() const override { return "conv1d"; }

    Tensor weight; ///< [Cout, Cin, K]
    Tensor bias;   ///< [Cout]
    Tensor grad_weight, grad_bias;

private:
    std::size_t cin_, cout_, k_;
    Tensor x_;
};

/// [C,L] -> [C,L/2], width-2 stride-2 max pooling; first index wins ties.
class MaxPool2 : public Layer {
public:
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string name() const override { return "maxpool2"; }

private:
    std::vector<std::size_t> in_shape_;
    std::vector<std::size_t> argmax_;
};

/// [C,L] -> [C], mean over the time axis.
class GlobalAvgPool : public Layer {
public:
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::string name() const override { return "gap"; }

private:
    std::vector<std::size_t> in_shape_;
};

/// [D,T] -> [H]: single LSTM layer consuming columns as time steps and
/// returning the final hidden state. Gate order i, f, g, o.
class LstmLast : public Layer {
public:
    LstmLast(std::size_t input, std::size_t hidden, Rng& rng);
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Tensor*> parameters() override { return {&w_x, &w_h, &bias}; }
    std::vector<Tensor*> gradients() override { return {&grad_w_x, &grad_w_h, &grad_bias}; }
    std::string name() const override { return "lstm"; }

    Tensor w_x;  ///< [4H, D]
    Tensor w_h;  ///< [4H, H]
    Tensor bias; ///< [4H]
    Tensor grad_w_x, grad_w_h, grad_bias;

private:
    std::size_t d_, h_;
    std::size_t t_steps_ = 0;
    Tensor x_;
    // per-step caches, each [T, H] (or [T, 4H] for gates)
    std::vector<double> gates_, cells_, hiddens_, tanh_c_;
};

/// y = relu(x + conv_b(relu(conv_a(x)))), identity skip; channel count is
/// preserved.
class ResidualConvBlock : public Layer {
public:
    ResidualConvBlock(std::size_t channels, std::size_t kernel, Rng& rng);
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Tensor*> parameters() override;
    std::vector<Tensor*> gradients() override;
    std::string name() const override { return "resblock"; }

    Conv1d conv_a, conv_b;

private:
    Relu relu_mid_;
    Tensor sum_; // pre-activation of the output relu
};

/// Uniform fan-in init: U(-1/sqrt(fan_in), +1/sqrt(fan_in)).
void init_uniform_fan_in(Tensor& w, std::size_t fan_in, Rng& rng);

} // namespace lcdr

#endif
