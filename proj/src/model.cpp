#include "lcdr/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lcdr/errors.hpp"

namespace lcdr {

Architecture parse_architecture(const std::string& s) {
    if (s == "mlp") return Architecture::Mlp;
    if (s == "cnn") return Architecture::Cnn;
    if (s == "lstm") return Architecture::Lstm;
    if (s == "resnet") return Architecture::Resnet;
    throw ParameterError("unknown architecture: " + s);
}

std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::Mlp: return "mlp";
        case Architecture::Cnn: return "cnn";
        case Architecture::Lstm: return "lstm";
        case Architecture::Resnet: return "resnet";
    }
    throw ParameterError("unknown architecture enum value");
}

void TrainConfig::validate() const {
    if (epochs < 0) throw ParameterError("epochs must be >= 0");
    if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
    if (!(learning_rate > 0)) throw ParameterError("learning_rate must be positive");
}

double Model::logit(const Tensor& x) {
    if (x.rank() != 2 || x.shape[0] != kChannels ||
        x.shape[1] != static_cast<std::size_t>(input_length))
        throw ParameterError("model input must be [6," + std::to_string(input_length) +
                             "], got " + shape_string(x.shape));
    Tensor cur = x;
    for (auto& layer : stack) {
        cur = layer->forward(cur);
        require_finite(cur, "forward through " + layer->name());
    }
    if (cur.size() != 1) throw NumericError("model stack must end in one logit");
    return cur[0];
}

double Model::forward(const Tensor& x) {
    const double z = logit(x);
    double p = 1.0 / (1.0 + std::exp(-z));
    // keep the probability in the open interval
    const double hi = 1.0 - 1e-16;
    if (p < 1e-300) p = 1e-300;
    if (p > hi) p = hi;
    return p;
}

Tensor Model::backward_from_logit(double grad_logit) {
    Tensor grad({1});
    grad[0] = grad_logit;
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        grad = (*it)->backward(grad);
        require_finite(grad, "backward through " + (*it)->name());
    }
    return grad;
}

void Model::zero_grad() {
    for (auto& layer : stack) layer->zero_grad();
}

std::vector<Tensor*> Model::parameters() {
    std::vector<Tensor*> out;
    for (auto& layer : stack)
        for (Tensor* p : layer->parameters()) out.push_back(p);
    return out;
}

std::vector<Tensor*> Model::gradients() {
    std::vector<Tensor*> out;
    for (auto& layer : stack)
        for (Tensor* g : layer->gradients()) out.push_back(g);
    return out;
}

std::size_t Model::parameter_count() {
    std::size_t n = 0;
    for (Tensor* p : parameters()) n += p->size();
    return n;
}

Model make_model(Architecture arch, int input_length, std::uint64_t seed) {
    if (input_length < 2) throw ParameterError("input_length must be >= 2");
    Model m;
    m.architecture = arch;
    m.input_length = input_length;
    Rng rng(derive_seed(seed, 0x6d6f64656cULL));
    const std::size_t t = static_cast<std::size_t>(input_length);
    switch (arch) {
        case Architecture::Mlp:
            m.stack.push_back(std::make_unique<Flatten>());
            m.stack.push_back(std::make_unique<Dense>(kChannels * t, 128, rng));
            m.stack.push_back(std::make_unique<Relu>());
            m.stack.push_back(std::make_unique<Dense>(128, 64, rng));
            m.stack.push_back(std::make_unique<Relu>());
            m.stack.push_back(std::make_unique<Dense>(64, 1, rng));
            break;
        case Architecture::Cnn:
            m.stack.push_back(std::make_unique<Conv1d>(kChannels, 16, 5, rng));
            m.stack.push_back(std::make_unique<Relu>());
            m.stack.push_back(std::make_unique<MaxPool2>());
            m.stack.push_back(std::make_unique<Conv1d>(16, 32, 5, rng));
            m.stack.push_back(std::make_unique<Relu>());
            m.stack.push_back(std::make_unique<GlobalAvgPool>());
            m.stack.push_back(std::make_unique<Dense>(32, 1, rng));
            break;
        case Architecture::Lstm:
            m.stack.push_back(std::make_unique<LstmLast>(kChannels, 32, rng));
            m.stack.push_back(std::make_unique<Dense>(32, 1, rng));
            break;
        case Architecture::Resnet:
            m.stack.push_back(std::make_unique<Conv1d>(kChannels, 16, 5, rng));
            m.stack.push_back(std::make_unique<Relu>());
            m.stack.push_back(std::make_unique<ResidualConvBlock>(16, 5, rng));
            m.stack.push_back(std::make_unique<ResidualConvBlock>(16, 5, rng));
            m.stack.push_back(std::make_unique<GlobalAvgPool>());
            m.stack.push_back(std::make_unique<Dense>(16, 1, rng));
            break;
    }
    return m;
}

double bce_loss(double prob, int label) {
    if (label != 0 && label != 1) throw ParameterError("label must be 0 or 1");
    constexpr double eps = 1e-7;
    const double p = std::min(std::max(prob, eps), 1.0 - eps);
    return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

GradResult backward(Model& model, const Tensor& x, int label) {
    if (label != 0 && label != 1) throw ParameterError("label must be 0 or 1");
    GradResult r;
    r.prob = model.forward(x);
    r.loss = bce_loss(r.prob, label);
    // d(bce)/d(logit) of the fused sigmoid+bce path
    r.input_grad = model.backward_from_logit(r.prob - static_cast<double>(label));
    return r;
}

int predict(Model& model, const Tensor& x) {
    return model.forward(x) >= 0.5 ? kLabelFdia : kLabelFault;
}

std::vector<int> predict_batch(Model& model, const Dataset& ds) {
    if (!model.has_scaler) throw ParameterError("model has no scaler fitted");
    std::vector<int> out;
    out.reserve(ds.size());
    for (const auto& sample : ds.samples)
        out.push_back(predict(model, model.scaler.apply(sample.window)));
    return out;
}

// ------------------------------------------------------------ checkpoint

namespace {

constexpr char kMagic[8] = {'L', 'C', 'D', 'R', 'M', 'D', 'L', '1'};

template <class T>
void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_pod(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated checkpoint");
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

} // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
    os.write(kMagic, sizeof(kMagic));
    write_pod(os, static_cast<std::uint32_t>(model.architecture));
    write_pod(os, static_cast<std::uint32_t>(model.input_length));
    write_pod(os, static_cast<std::uint8_t>(model.has_scaler ? 1 : 0));
    for (double v : model.scaler.mean) write_pod(os, v);
    for (double v : model.scaler.stddev) write_pod(os, v);

    Model& mutable_model = const_cast<Model&>(model);
    auto params = mutable_model.parameters();
    write_pod(os, static_cast<std::uint32_t>(params.size()));
    for (const Tensor* p : params) {
        write_pod(os, static_cast<std::uint32_t>(p->shape.size()));
        for (std::size_t d : p->shape) write_pod(os, static_cast<std::uint64_t>(d));
        os.write(reinterpret_cast<const char*>(p->data.data()),
                 static_cast<std::streamsize>(p->data.size() * sizeof(double)));
    }
    if (!os) throw IoError("checkpoint write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path.string());
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("bad checkpoint magic/version: " + path.string());

    std::uint32_t arch_raw = 0, input_length = 0;
    std::uint8_t has_scaler = 0;
    read_pod(is, arch_raw);
    read_pod(is, input_length);
    read_pod(is, has_scaler);
    if (arch_raw > 3) throw IoError("unknown architecture id in checkpoint");

    Model m = make_model(static_cast<Architecture>(arch_raw),
                         static_cast<int>(input_length), 0);
    m.has_scaler = has_scaler != 0;
    for (double& v : m.scaler.mean) read_pod(is, v);
    for (double& v : m.scaler.stddev) read_pod(is, v);

    std::uint32_t n_params = 0;
    read_pod(is, n_params);
    auto params = m.parameters();
    if (n_params != params.size())
        throw IoError("checkpoint parameter count does not match architecture");
    for (Tensor* p : params) {
        std::uint32_t rank = 0;
        read_pod(is, rank);
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) {
            std::uint64_t raw = 0;
            read_pod(is, raw);
            d = static_cast<std::size_t>(raw);
        }
        if (shape != p->shape)
            throw IoError("checkpoint tensor shape mismatch");
        is.read(reinterpret_cast<char*>(p->data.data()),
                static_cast<std::streamsize>(p->data.size() * sizeof(double)));
        if (!is) throw IoError("truncated checkpoint tensor data");
    }
    char extra;
    if (is.read(&extra, 1)) throw IoError("trailing bytes in checkpoint");
    return m;
}

} // namespace lcdr
