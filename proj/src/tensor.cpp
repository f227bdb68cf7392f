#include "lcdr/tensor.hpp"

#include <cmath>
#include <sstream>

#include "lcdr/errors.hpp"

namespace lcdr {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
}

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(shape_numel(shape), 0.0);
}

void Tensor::fill(double v) {
    for (double& x : data) x = v;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i)
        os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

bool all_finite(const Tensor& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Tensor& t, const std::string& where) {
    if (!all_finite(t))
        throw NumericError("non-finite value in " + where);
}

} // namespace lcdr
