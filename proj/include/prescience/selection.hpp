#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prescience/data.hpp"
#include "prescience/mio.hpp"
#include "prescience/score.hpp"
#include "prescience/warmstart.hpp"

namespace prescience::selection {

enum class EpsilonMode { Exact, Rule, Fixed };

struct FitSpec {
    std::vector<int> q_candidates;
    int folds = 5;
    EpsilonMode epsilon_mode = EpsilonMode::Exact;
    double epsilon_fixed = 0.0;
    bool warm_start = false;
    double tau = 1.5;
    std::uint64_t seed = 0;
    mio::MioConfig mio;  // formulation, delta, limits; q and epsilon filled per solve
};

struct CvRow {
    int q = 0;
    double mean_validation_score = 0.0;
    int folds_used = 0;
};

struct WarmStartDiag {
    bool used = false;
    bool feasible_plus = false;
    bool feasible_minus = false;
    bool fallback = false;        // tightening infeasible (either alpha) or p >= n
    double volume_ratio = 1.0;    // refined volume / base volume, alpha=+1 side
    long lp_calls = 0;
};

struct FitReport {
    int q = 0;
    mio::SolveResult result;
    std::vector<CvRow> cv_table;
    WarmStartDiag warmstart;
};

// min{0.05, 0.5 sqrt(ln(max(p,n))/n)}
double epsilon_rule(std::size_t n, std::size_t p);

struct CvOutcome {
    int q_star = 0;
    std::vector<CvRow> table;
};

CvOutcome cross_validate_q(const data::Dataset& d, const FitSpec& spec,
                           const score::ParamBox& box);

FitReport fit(const data::Dataset& d, const FitSpec& spec, const score::ParamBox& box);

}  // namespace prescience::selection
