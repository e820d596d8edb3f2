// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specsep/srinet.hpp"

namespace specsep {

/// |a - b| / max(|a|, |b|, floor).
double relative_error(double analytic, double numeric, double floor);

struct GradCheckOptions {
    SrinetConfig model{.input_size = 16};
    int batch = 2;
    double step = 1e-5;
    /// Gradients smaller than this are compared in absolute terms.
    double floor = 1e-6;
    /// Central differences at step and step / 2 further apart than this mark
    /// a relu kink; the entry is retried at step / 10 and skipped if the
    /// estimates still disagree.
    double kink_tolerance = 1e-8;
    /// Entries checked per parameter tensor, evenly strided; 0 checks all.
    std::size_t per_tensor = 0;
    std::uint64_t seed = 0;
};

struct GradCheckEntry {
    std::string name;
    std::size_t checked = 0;
    double max_rel = 0.0;
    double max_abs = 0.0;
    std::size_t skipped = 0;
};

struct GradCheckResult {
    std::vector<GradCheckEntry> params;
    double max_rel = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;
};

/// Central differences of the batch cross-entropy loss against the taped
/// gradients, on seeded uniform inputs with alternating labels. Skipped
/// (kinked) entries are counted, not compared.
GradCheckResult grad_check_srinet(const GradCheckOptions& options);

}  // namespace specsep
