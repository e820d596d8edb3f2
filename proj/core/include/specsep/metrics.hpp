// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace specsep {

/// Labels are 1 for fake (positive) and 0 for real. Both AUC variants
/// return P(score_fake > score_real) + 0.5 P(tie) and throw when either
/// class is missing.
double auc_pair_counting(std::span<const double> scores,
                         std::span<const int> labels);
double auc_rank(std::span<const double> scores, std::span<const int> labels);

/// Pair counting up to 10^4 samples, ranks above.
double compute_auc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
    double threshold;  // samples with score >= threshold are called fake
    double tpr;
    double fpr;
};

/// Starts at (+inf, 0, 0) and adds one point per distinct score in
/// descending order, ending at (0-or-min, 1, 1).
std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const int> labels);

struct HistogramBin {
    double lo, hi;
    int real_count;
    int fake_count;
};

/// Equal-width bins spanning [min, max] of all scores.
std::vector<HistogramBin> score_histogram(std::span<const double> scores,
                                          std::span<const int> labels,
                                          int bins);

}  // namespace specsep
