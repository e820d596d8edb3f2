// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <vector>

#include "specsep/sh.hpp"

namespace specsep::detail {

struct MaskedBasis {
    std::vector<std::size_t> pixel;  // linear pixel index
    std::vector<SHBasis> h;          // basis at that pixel
};

MaskedBasis masked_basis(const GeometryBuffers& buffers);

/// Solves the 9x9 system given its packed upper triangle (row-major).
std::array<double, kShCount> solve_normal_equations(const double* upper,
                                                    const double* rhs);

/// Least-squares gamma for one channel over the listed rows of `basis`.
std::array<double, kShCount> fit_channel(const MaskedBasis& basis,
                                         std::span<const double> image,
                                         std::span<const double> texture,
                                         std::span<const std::size_t> rows);

}  // namespace specsep::detail
