// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "specsep/error.hpp"

namespace specsep {

namespace {

struct ClassCounts {
    std::int64_t pos = 0, neg = 0;
};

ClassCounts
check_labels(std::span<const double> scores, std::span<const int> labels)
{
    require(scores.size() == labels.size(), "score and label counts differ");
    ClassCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] == 0 || labels[i] == 1, "labels must be 0 or 1");
        require(!std::isnan(scores[i]), "scores must not be NaN");
        (labels[i] ? c.pos : c.neg) += 1;
    }
    if (c.pos == 0 || c.neg == 0)
        fail(ErrorKind::InvalidArgument, "AUC needs both classes");
    return c;
}

}  // namespace

double
auc_pair_counting(std::span<const double> scores, std::span<const int> labels)
{
    const ClassCounts c = check_labels(scores, labels);
    // twice the Mann-Whitney statistic: 2 per win, 1 per tie
    std::int64_t twice = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i])
            continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j])
                continue;
            if (scores[i] > scores[j])
                twice += 2;
            else if (scores[i] == scores[j])
                twice += 1;
        }
    }
    return double(twice) / (2.0 * double(c.pos) * double(c.neg));
}

double
auc_rank(std::span<const double> scores, std::span<const int> labels)
{
    const ClassCounts c = check_labels(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });
    // twice the positive rank sum; midranks of tie groups are (lo+hi)/2
    std::int64_t twice_rank_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]])
            ++j;
        const std::int64_t twice_mid = std::int64_t(i + 1) + std::int64_t(j + 1);
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]])
                twice_rank_sum += twice_mid;
        i = j + 1;
    }
    const std::int64_t twice_u = twice_rank_sum - c.pos * (c.pos + 1);
    return double(twice_u) / (2.0 * double(c.pos) * double(c.neg));
}

double
compute_auc(std::span<const double> scores, std::span<const int> labels)
{
    return scores.size() <= 10000 ? auc_pair_counting(scores, labels)
                                  : auc_rank(scores, labels);
}

std::vector<RocPoint>
roc_curve(std::span<const double> scores, std::span<const int> labels)
{
    const ClassCounts c = check_labels(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return scores[a] > scores[b];
                     });
    std::vector<RocPoint> roc;
    roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] ? tp : fp) += 1;
            ++i;
        }
        roc.push_back({threshold, double(tp) / double(c.pos),
                       double(fp) / double(c.neg)});
    }
    return roc;
}

std::vector<HistogramBin>
score_histogram(std::span<const double> scores, std::span<const int> labels,
                int bins)
{
    require(bins >= 1, "histogram needs at least one bin");
    require(scores.size() == labels.size(), "score and label counts differ");
    std::vector<HistogramBin> out;
    if (scores.empty())
        return out;
    const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *mn;
    const double hi = *mx > lo ? *mx : lo + 1.0;
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b)
        out.push_back({lo + b * width, b + 1 == bins ? hi : lo + (b + 1) * width,
                       0, 0});
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int b = int((scores[i] - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        (labels[i] ? out[b].fake_count : out[b].real_count) += 1;
    }
    return out;
}

}  // namespace specsep
