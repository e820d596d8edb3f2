// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace specsep {

/// Dense row-major array of doubles.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, double fill = 0.0);
    Tensor(std::vector<int> shape, std::vector<double> data);

    const std::vector<int>& shape() const noexcept { return m_shape; }
    int rank() const noexcept { return int(m_shape.size()); }
    int dim(int i) const { return m_shape.at(std::size_t(i)); }
    std::size_t size() const noexcept { return m_data.size(); }

    double& operator[](std::size_t i) { return m_data[i]; }
    double operator[](std::size_t i) const { return m_data[i]; }

    std::span<double> data() noexcept { return m_data; }
    std::span<const double> data() const noexcept { return m_data; }
    double* ptr() noexcept { return m_data.data(); }
    const double* ptr() const noexcept { return m_data.data(); }

    /// Same data, new shape of equal element count.
    Tensor reshaped(std::vector<int> shape) const;

    void fill(double v);
    bool all_finite() const noexcept;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<int> m_shape;
    std::vector<double> m_data;
};

std::size_t shape_size(const std::vector<int>& shape);
std::string shape_string(const std::vector<int>& shape);

}  // namespace specsep
