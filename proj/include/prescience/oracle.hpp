#pragma once

#include "prescience/data.hpp"
#include "prescience/score.hpp"

namespace prescience::oracle {

struct OracleResult {
    double best_score = 0.0;
    score::Coefficients witness;
    long patterns_checked = 0;
    bool found = false;
};

// Exact maximum of the empirical score over the box with ||gamma||_0 <= q,
// under the same delta-margin semantics as the MIO (an index may be >= 0 or
// <= -delta, never in between). Enumerates prediction patterns in decreasing
// score order per (alpha, subset) branch and LP-checks feasibility, so the
// first feasible pattern is that branch's maximum. Guard rails: n <= 14,
// p <= 5.
OracleResult exact_max_score(const data::Dataset& d, const score::ParamBox& box,
                             int q, double delta);

}  // namespace prescience::oracle
