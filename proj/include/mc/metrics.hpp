#pragma once

#include <optional>
#include <vector>

namespace mc {

// Numerically stable logistic; sigmoid(0) == 0.5.
double sigmoid(double x);

// Pairwise ranking loss with a difficulty decay coefficient:
//   L = -(1 - 2*max(0, P - 1/2))^2 * log(P),  P = sigmoid(r_plus - r_minus).
// The coefficient only takes effect when P > 0.5, so the loss is -log(P) on
// wrong-side pairs. Natural log throughout. Continuous everywhere; the
// derivative has a kink at P = 0.5.
double focal_ranking_loss(double r_plus, double r_minus);

// Analytic d(loss)/d(r_plus). At the P = 0.5 kink this returns the
// inactive-coefficient (left) branch, matching the prose rule above.
double focal_ranking_loss_grad_plus(double r_plus, double r_minus);

// Rank correlation with average ranks on ties. Throws on length mismatch,
// fewer than 2 points, or a constant vector (undefined correlation).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Classification against score >= threshold. Degenerate cases (no gold
// positive, no predicted positive, or an empty precision+recall sum) leave
// the affected metrics unset rather than silently zero.
struct F1Result {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

F1Result f1_thresholded(const std::vector<double>& scores, const std::vector<bool>& gold,
                        double threshold = 7.0);

}  // namespace mc
