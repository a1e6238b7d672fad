#pragma once

#include <vector>

#include "prescience/data.hpp"
#include "prescience/score.hpp"

namespace prescience::warmstart {

struct LogitFit {
    std::vector<double> coefficients;  // over (intercept, x0, x_tilde sans dup intercept, z)
    std::vector<double> fitted_probabilities;
    bool converged = false;
    bool separation = false;
    int iterations = 0;
};

struct RefinedSpace {
    std::vector<double> l_hat;  // length k+p
    std::vector<double> u_hat;
    double tau = 1.0;
    bool feasible = false;
    score::ParamBox box;  // the tau-enlarged box, when feasible
    long lp_calls = 0;
};

// Newton/IRLS logistic fit with step halving; converged when the gradient
// max-norm drops below 1e-8 (or 100 iterations). Perfect separation is
// flagged, probabilities clipped to [1e-6, 1-1e-6], and the fit returned
// anyway: only the signs of P-0.5 are consumed downstream.
LogitFit fit_logit(const data::Dataset& d);

// Sequential sign-matching LP bounds over the joint (beta, gamma) coordinates:
// 2(k+p) LPs, each imposing the intervals fixed so far. Infeasibility is a
// result state, not an error.
RefinedSpace tighten_bounds(const data::Dataset& d, int alpha,
                            const score::ParamBox& base_box,
                            const std::vector<double>& probs);

// Coordinate j of the result is [-tau(|l|v|u|), +tau(|l|v|u|)] intersected
// with the base bounds.
score::ParamBox enlarge(const RefinedSpace& r, const score::ParamBox& base_box,
                        double tau);

}  // namespace prescience::warmstart
