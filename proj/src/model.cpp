#include "kslab/model.hpp"

#include <cmath>
#include <sstream>

#include "kslab/error.hpp"

namespace kslab {

HypothesisReport validate_coefficients(const CoefficientField& coeffs, const Params& params) {
    coeffs.require_positive_bounded();
    const double cm = params.chi * params.mu;
    const double a_inf = coeffs.a_inf();
    const double a_sup = coeffs.a_sup();
    const double b_inf = coeffs.b_inf();

    HypothesisReport r;
    r.slack_h1 = b_inf - cm;
    r.slack_h2 = b_inf - (1.0 + a_sup / a_inf) * cm;
    const double root = 1.0 + std::sqrt(1.0 + params.dim * a_inf / (4.0 * params.lambda));
    r.slack_h3 = b_inf - (1.0 + root * a_sup / (2.0 * a_inf)) * cm;
    r.holds_h1 = r.slack_h1 > 0.0;
    r.holds_h2 = r.slack_h2 > 0.0;
    r.holds_h3 = r.slack_h3 > 0.0;
    return r;
}

AttractionRectangle attraction_rectangle(const CoefficientField& coeffs, const Params& params) {
    const auto hyp = validate_coefficients(coeffs, params);
    if (!hyp.holds_h2) {
        std::ostringstream msg;
        msg << "attraction_rectangle: (H2) fails (slack " << hyp.slack_h2 << ")";
        throw HypothesisViolation(msg.str());
    }
    const double cm = params.chi * params.mu;
    const double a_inf = coeffs.a_inf();
    const double a_sup = coeffs.a_sup();
    const double bi = coeffs.b_inf() - cm;
    const double bs = coeffs.b_sup() - cm;
    const double denom = bs * bi - cm * cm;
    return {(bi * a_inf - cm * a_sup) / denom, (bs * a_sup - cm * a_inf) / denom};
}

double sup_bound(const CoefficientField& coeffs, const Params& params) {
    coeffs.require_positive_bounded();
    const double gap = coeffs.b_inf() - params.chi * params.mu;
    if (!(gap > 0.0)) throw HypothesisViolation("sup_bound: (H1) fails, b_inf <= chi*mu");
    return coeffs.a_sup() / gap;
}

}  // namespace kslab
