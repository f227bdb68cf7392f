#include "lcdr/layers.hpp"

#include <algorithm>
#include <cmath>

#include "lcdr/errors.hpp"

namespace lcdr {

void init_uniform_fan_in(Tensor& w, std::size_t fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : w.data) v = rng.uniform(-bound, bound);
}

// ---------------------------------------------------------------- Dense

Dense::Dense(std::size_t in, std::size_t out, Rng& rng)
    : weight({out, in}),
      bias({out}),
      grad_weight({out, in}),
      grad_bias({out}),
      in_(in),
      out_(out) {
    init_uniform_fan_in(weight, in, rng);
}

Tensor Dense::forward(const Tensor& x) {
    if (x.size() != in_)
        throw ParameterError("dense: input size " + std::to_string(x.size()) +
                             " != " + std::to_string(in_));
    x_ = x;
    Tensor y({out_});
    for (std::size_t o = 0; o < out_; ++o) {
        double acc = bias[o];
        const double* wrow = &weight.data[o * in_];
        for (std::size_t i = 0; i < in_; ++i) acc += wrow[i] * x[i];
        y[o] = acc;
    }
    return y;
}

Tensor Dense::backward(const Tensor& grad_out) {
    Tensor dx({in_});
    for (std::size_t o = 0; o < out_; ++o) {
        const double g = grad_out[o];
        grad_bias[o] += g;
        double* gwrow = &grad_weight.data[o * in_];
        const double* wrow = &weight.data[o * in_];
        for (std::size_t i = 0; i < in_; ++i) {
            gwrow[i] += g * x_[i];
            dx[i] += g * wrow[i];
        }
    }
    return dx;
}

// ----------------------------------------------------------------- Relu

Tensor Relu::forward(const Tensor& x) {
    x_ = x;
    Tensor y = x;
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor Relu::backward(const Tensor& grad_out) {
    Tensor dx = grad_out;
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (x_[i] <= 0.0) dx[i] = 0.0;
    return dx;
}

// -------------------------------------------------------------- Sigmoid

Tensor Sigmoid::forward(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
    y_ = y;
    return y;
}

Tensor Sigmoid::backward(const Tensor& grad_out) {
    Tensor dx = grad_out;
    for (std::size_t i = 0; i < dx.size(); ++i)
        dx[i] *= y_[i] * (1.0 - y_[i]);
    return dx;
}

// -------------------------------------------------------------- Flatten

Tensor Flatten::forward(const Tensor& x) {
    in_shape_ = x.shape;
    Tensor y = x;
    y.shape = {x.size()};
    return y;
}

Tensor Flatten::backward(const Tensor& grad_out) {
    Tensor dx = grad_out;
    dx.shape = in_shape_;
    return dx;
}

// --------------------------------------------------------------- Conv1d

Conv1d::Conv1d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, Rng& rng)
    : weight({out_ch, in_ch, kernel}),
      bias({out_ch}),
      grad_weight({out_ch, in_ch, kernel}),
      grad_bias({out_ch}),
      cin_(in_ch),
      cout_(out_ch),
      k_(kernel) {
    if (kernel % 2 == 0) throw ParameterError("conv1d kernel must be odd");
    init_uniform_fan_in(weight, in_ch * kernel, rng);
}

Tensor Conv1d::forward(const Tensor& x) {
    if (x.rank() != 2 || x.shape[0] != cin_)
        throw ParameterError("conv1d: expected [" + std::to_string(cin_) + ",L] input, got " +
                             shape_string(x.shape));
    x_ = x;
    const std::size_t len = x.shape[1];
    const long pad = static_cast<long>(k_ / 2);
    Tensor y({cout_, len});
    for (std::size_t co = 0; co < cout_; ++co) {
        for (std::size_t t = 0; t < len; ++t) {
            double acc = bias[co];
            for (std::size_t ci = 0; ci < cin_; ++ci) {
                const double* xr = &x.data[ci * len];
                const double* wr = &weight.data[(co * cin_ + ci) * k_];
                for (std::size_t k = 0; k < k_; ++k) {
                    const long src = static_cast<long>(t) + static_cast<long>(k) - pad;
                    if (src >= 0 && src < static_cast<long>(len)) acc += wr[k] * xr[src];
                }
            }
            y.at(co, t) = acc;
        }
    }
    return y;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
    const std::size_t len = x_.shape[1];
    const long pad = static_cast<long>(k_ / 2);
    Tensor dx({cin_, len});
    for (std::size_t co = 0; co < cout_; ++co) {
        const double* gy = &grad_out.data[co * len];
        for (std::size_t t = 0; t < len; ++t) grad_bias[co] += gy[t];
        for (std::size_t ci = 0; ci < cin_; ++ci) {
            const double* xr = &x_.data[ci * len];
            double* dxr = &dx.data[ci * len];
            double* gwr = &grad_weight.data[(co * cin_ + ci) * k_];
            const double* wr = &weight.data[(co * cin_ + ci) * k_];
            for (std::size_t t = 0; t < len; ++t) {
                const double g = gy[t];
                for (std::size_t k = 0; k < k_; ++k) {
                    const long src = static_cast<long>(t) + static_cast<long>(k) - pad;
                    if (src >= 0 && src < static_cast<long>(len)) {
                        gwr[k] += g * xr[src];
                        dxr[src] += g * wr[k];
                    }
                }
            }
        }
    }
    return dx;
}

// ------------------------------------------------------------- MaxPool2

Tensor MaxPool2::forward(const Tensor& x) {
    if (x.rank() != 2) throw ParameterError("maxpool2: expected [C,L] input");
    in_shape_ = x.shape;
    const std::size_t ch = x.shape[0], len = x.shape[1], out_len = len / 2;
    Tensor y({ch, out_len});
    argmax_.assign(ch * out_len, 0);
    for (std::size_t c = 0; c < ch; ++c) {
        for (std::size_t t = 0; t < out_len; ++t) {
            const std::size_t a = c * len + 2 * t;
            const std::size_t best = (x.data[a] >= x.data[a + 1]) ? a : a + 1;
            argmax_[c * out_len + t] = best;
            y.at(c, t) = x.data[best];
        }
    }
    return y;
}

Tensor MaxPool2::backward(const Tensor& grad_out) {
    Tensor dx(in_shape_);
    for (std::size_t i = 0; i < argmax_.size(); ++i)
        dx.data[argmax_[i]] += grad_out[i];
    return dx;
}

// -------------------------------------------------------- GlobalAvgPool

Tensor GlobalAvgPool::forward(const Tensor& x) {
    if (x.rank() != 2) throw ParameterError("gap: expected [C,L] input");
    in_shape_ = x.shape;
    const std::size_t ch = x.shape[0], len = x.shape[1];
    Tensor y({ch});
    for (std::size_t c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (std::size_t t = 0; t < len; ++t) acc += x.at(c, t);
        y[c] = acc / static_cast<double>(len);
    }
    return y;
}

Tensor GlobalAvgPool::backward(const Tensor& grad_out) {
    Tensor dx(in_shape_);
    const std::size_t ch = in_shape_[0], len = in_shape_[1];
    for (std::size_t c = 0; c < ch; ++c) {
        const double g = grad_out[c] / static_cast<double>(len);
        for (std::size_t t = 0; t < len; ++t) dx.at(c, t) = g;
    }
    return dx;
}

// ------------------------------------------------------------- LstmLast

namespace {
double sigmoid_scalar(double v) { return 1.0 / (1.0 + std::exp(-v)); }
} // namespace

LstmLast::LstmLast(std::size_t input, std::size_t hidden, Rng& rng)
    : w_x({4 * hidden, input}),
      w_h({4 * hidden, hidden}),
      bias({4 * hidden}),
      grad_w_x({4 * hidden, input}),
      grad_w_h({4 * hidden, hidden}),
      grad_bias({4 * hidden}),
      d_(input),
      h_(hidden) {
    init_uniform_fan_in(w_x, input, rng);
    init_uniform_fan_in(w_h, hidden, rng);
}

Tensor LstmLast::forward(const Tensor& x) {
    if (x.rank() != 2 || x.shape[0] != d_)
        throw ParameterError("lstm: expected [" + std::to_string(d_) + ",T] input, got " +
                             shape_string(x.shape));
    x_ = x;
    t_steps_ = x.shape[1];
    const std::size_t g4 = 4 * h_;
    gates_.assign(t_steps_ * g4, 0.0);
    cells_.assign(t_steps_ * h_, 0.0);
    hiddens_.assign(t_steps_ * h_, 0.0);
    tanh_c_.assign(t_steps_ * h_, 0.0);

    std::vector<double> h_prev(h_, 0.0), c_prev(h_, 0.0);
    for (std::size_t t = 0; t < t_steps_; ++t) {
        double* gate = &gates_[t * g4];
        for (std::size_t r = 0; r < g4; ++r) {
            double acc = bias[r];
            const double* wxr = &w_x.data[r * d_];
            for (std::size_t i = 0; i < d_; ++i) acc += wxr[i] * x.at(i, t);
            const double* whr = &w_h.data[r * h_];
            for (std::size_t j = 0; j < h_; ++j) acc += whr[j] * h_prev[j];
            gate[r] = acc;
        }
        for (std::size_t j = 0; j < h_; ++j) {
            const double gi = sigmoid_scalar(gate[j]);
            const double gf = sigmoid_scalar(gate[h_ + j]);
            const double gg = std::tanh(gate[2 * h_ + j]);
            const double go = sigmoid_scalar(gate[3 * h_ + j]);
            gate[j] = gi;
            gate[h_ + j] = gf;
            gate[2 * h_ + j] = gg;
            gate[3 * h_ + j] = go;
            const double c = gf * c_prev[j] + gi * gg;
            const double tc = std::tanh(c);
            cells_[t * h_ + j] = c;
            tanh_c_[t * h_ + j] = tc;
            hiddens_[t * h_ + j] = go * tc;
        }
        for (std::size_t j = 0; j < h_; ++j) {
            h_prev[j] = hiddens_[t * h_ + j];
            c_prev[j] = cells_[t * h_ + j];
        }
    }

    Tensor y({h_});
    for (std::size_t j = 0; j < h_; ++j) y[j] = h_prev[j];
    return y;
}

Tensor LstmLast::backward(const Tensor& grad_out) {
    const std::size_t g4 = 4 * h_;
    Tensor dx({d_, t_steps_});
    std::vector<double> dh(grad_out.data.begin(), grad_out.data.end());
    std::vector<double> dc(h_, 0.0);
    std::vector<double> da(g4, 0.0);

    for (std::size_t t = t_steps_; t-- > 0;) {
        const double* gate = &gates_[t * g4];
        const double* c_prev = (t == 0) ? nullptr : &cells_[(t - 1) * h_];
        for (std::size_t j = 0; j < h_; ++j) {
            const double gi = gate[j];
            const double gf = gate[h_ + j];
            const double gg = gate[2 * h_ + j];
            const double go = gate[3 * h_ + j];
            const double tc = tanh_c_[t * h_ + j];
            const double cp = c_prev ? c_prev[j] : 0.0;

            const double dgo = dh[j] * tc;
            const double dct = dc[j] + dh[j] * go * (1.0 - tc * tc);
            const double dgi = dct * gg;
            const double dgf = dct * cp;
            const double dgg = dct * gi;

            da[j] = dgi * gi * (1.0 - gi);
            da[h_ + j] = dgf * gf * (1.0 - gf);
            da[2 * h_ + j] = dgg * (1.0 - gg * gg);
            da[3 * h_ + j] = dgo * go * (1.0 - go);
            dc[j] = dct * gf;
        }
        // parameter gradients and downstream gradients
        const double* h_prev = (t == 0) ? nullptr : &hiddens_[(t - 1) * h_];
        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t r = 0; r < g4; ++r) {
            const double g = da[r];
            grad_bias[r] += g;
            double* gwx = &grad_w_x.data[r * d_];
            for (std::size_t i = 0; i < d_; ++i) {
                gwx[i] += g * x_.at(i, t);
                dx.at(i, t) += g * w_x.data[r * d_ + i];
            }
            double* gwh = &grad_w_h.data[r * h_];
            const double* whr = &w_h.data[r * h_];
            for (std::size_t j = 0; j < h_; ++j) {
                if (h_prev) gwh[j] += g * h_prev[j];
                dh[j] += g * whr[j];
            }
        }
    }
    return dx;
}

// --------------------------------------------------- ResidualConvBlock

ResidualConvBlock::ResidualConvBlock(std::size_t channels, std::size_t kernel, Rng& rng)
    : conv_a(channels, channels, kernel, rng), conv_b(channels, channels, kernel, rng) {}

Tensor ResidualConvBlock::forward(const Tensor& x) {
    Tensor y = conv_b.forward(relu_mid_.forward(conv_a.forward(x)));
    if (!y.same_shape(x)) throw ParameterError("resblock: branch changed shape");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i];
    sum_ = y;
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor ResidualConvBlock::backward(const Tensor& grad_out) {
    Tensor dsum = grad_out;
    for (std::size_t i = 0; i < dsum.size(); ++i)
        if (sum_[i] <= 0.0) dsum[i] = 0.0;
    Tensor dbranch = conv_a.backward(relu_mid_.backward(conv_b.backward(dsum)));
    for (std::size_t i = 0; i < dbranch.size(); ++i) dbranch[i] += dsum[i];
    return dbranch;
}

std::vector<Tensor*> ResidualConvBlock::parameters() {
    return {&conv_a.weight, &conv_a.bias, &conv_b.weight, &conv_b.bias};
}

std::vector<Tensor*> ResidualConvBlock::gradients() {
    return {&conv_a.grad_weight, &conv_a.grad_bias, &conv_b.grad_weight, &conv_b.grad_bias};
}

} // namespace lcdr
