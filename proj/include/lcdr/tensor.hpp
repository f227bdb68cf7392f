#ifndef LCDR_TENSOR_HPP
#define LCDR_TENSOR_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace lcdr {

/// Dense row-major tensor of doubles. Shapes are small and fixed per
/// architecture, so this is a shape-tagged buffer rather than a general
/// n-d array library.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s);

    static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    /// 2-D accessors (row-major); valid when rank() == 2.
    double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

    void fill(double v);
    bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);
std::string shape_string(const std::vector<std::size_t>& shape);

bool all_finite(const Tensor& t);

/// Throws NumericError naming `where` if any entry is NaN or infinite.
void require_finite(const Tensor& t, const std::string& where);

} // namespace lcdr

#endif
