// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "specsep/error.hpp"

namespace specsep {

std::size_t
shape_size(const std::vector<int>& shape)
{
    std::size_t n = 1;
    for (int d : shape) {
        require(d >= 0, "negative tensor dimension");
        n *= std::size_t(d);
    }
    return n;
}

std::string
shape_string(const std::vector<int>& shape)
{
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor::Tensor(std::vector<int> shape, double fill)
    : m_shape(std::move(shape)), m_data(shape_size(m_shape), fill)
{
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : m_shape(std::move(shape)), m_data(std::move(data))
{
    require(m_data.size() == shape_size(m_shape),
            "tensor data length does not match shape "
                + shape_string(m_shape));
}

Tensor
Tensor::reshaped(std::vector<int> shape) const
{
    require(shape_size(shape) == m_data.size(),
            "cannot reshape " + shape_string(m_shape) + " to "
                + shape_string(shape));
    return Tensor(std::move(shape), m_data);
}

void
Tensor::fill(double v)
{
    std::fill(m_data.begin(), m_data.end(), v);
}

bool
Tensor::all_finite() const noexcept
{
    return std::all_of(m_data.begin(), m_data.end(),
                       [](double v) { return std::isfinite(v); });
}

}  // namespace specsep
