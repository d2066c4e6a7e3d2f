/**
 * @file model.hpp
 * @brief Hypothesis checks and the closed-form constants of the model.
 */
#pragma once

#include <utility>

#include "kslab/coefficients.hpp"
#include "kslab/params.hpp"

namespace kslab {

/// Slack = LHS - RHS of each inequality; a hypothesis holds iff its slack > 0.
struct HypothesisReport {
    bool holds_h1 = false;
    bool holds_h2 = false;
    bool holds_h3 = false;
    double slack_h1 = 0.0;
    double slack_h2 = 0.0;
    double slack_h3 = 0.0;
};

/// b_inf > chi mu; b_inf > (1 + a_sup/a_inf) chi mu; and the spreading
/// condition involving sqrt(1 + N a_inf / (4 lambda)).
HypothesisReport validate_coefficients(const CoefficientField& coeffs, const Params& params);

struct AttractionRectangle {
    double lower = 0.0;
    double upper = 0.0;
};

/// Eventual trapping band [M_lower, M_upper]; requires (H2).
AttractionRectangle attraction_rectangle(const CoefficientField& coeffs, const Params& params);

/// a_sup / (b_inf - chi mu); requires (H1).
double sup_bound(const CoefficientField& coeffs, const Params& params);

}  // namespace kslab
