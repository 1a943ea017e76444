#include "mc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mc/common.hpp"

namespace mc {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

// log(sigmoid(g)) without cancellation for large |g|.
double log_sigmoid(double g) {
    if (g >= 0.0) return -std::log1p(std::exp(-g));
    return g - std::log1p(std::exp(g));
}

}  // namespace

double focal_ranking_loss(double r_plus, double r_minus) {
    const double gap = r_plus - r_minus;
    const double p = sigmoid(gap);
    const double coef = 1.0 - 2.0 * std::max(0.0, p - 0.5);
    return -coef * coef * log_sigmoid(gap);
}

double focal_ranking_loss_grad_plus(double r_plus, double r_minus) {
    const double gap = r_plus - r_minus;
    const double p = sigmoid(gap);
    if (p <= 0.5) {
        // L = -log P; dL/dg = -(1 - P)
        return -(1.0 - p);
    }
    // L = -(2 - 2P)^2 log P; dL/dP = 8(1-P) log P - 4(1-P)^2 / P
    const double one_minus_p = 1.0 - p;
    const double dldp = 8.0 * one_minus_p * std::log(p) - 4.0 * one_minus_p * one_minus_p / p;
    return dldp * p * one_minus_p;  // chain rule through sigmoid
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw Error("spearman: length mismatch");
    if (xs.size() < 2) throw Error("spearman: need at least 2 points");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mean = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error("spearman: undefined for a constant vector");
    return sxy / std::sqrt(sxx * syy);
}

F1Result f1_thresholded(const std::vector<double>& scores, const std::vector<bool>& gold,
                        double threshold) {
    if (scores.size() != gold.size()) throw Error("f1_thresholded: length mismatch");
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;  // inclusive
        if (pred && gold[i]) ++tp;
        if (pred && !gold[i]) ++fp;
        if (!pred && gold[i]) ++fn;
    }
    F1Result out;
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (out.precision && out.recall && (*out.precision + *out.recall) > 0.0)
        out.f1 = 2.0 * *out.precision * *out.recall / (*out.precision + *out.recall);
    return out;
}

}  // namespace mc
