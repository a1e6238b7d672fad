#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "prescience/data.hpp"
#include "prescience/lp.hpp"
#include "prescience/score.hpp"

namespace prescience::mio {

enum class Formulation { A, B };
enum class NodeSelection { BestBound, DepthFirst };

struct MioConfig {
    Formulation formulation = Formulation::A;
    int q = 0;
    double delta = 1e-6;
    double epsilon = 0.0;          // gap tolerance in average-score units
    long node_limit = -1;          // < 0: unlimited
    double time_limit = -1.0;      // seconds, < 0: unlimited
    NodeSelection node_selection = NodeSelection::BestBound;
};

enum class SolveStatus { Optimal, GapReached, NodeLimit, TimeLimit, Infeasible };

struct SolveResult {
    score::Coefficients coefficients;
    double score = 0.0;
    double best_bound = 0.0;
    double mio_gap = 0.0;
    long nodes_explored = 0;
    SolveStatus status = SolveStatus::Infeasible;
    double wall_seconds = 0.0;
    bool has_incumbent = false;
};

// One alpha sub-problem in LP form. Variable layout: beta (k), gamma (p),
// d (n), e (p); constraints exactly 2n+2p+1 (A) or n+2p+1 (B).
struct MioProblem {
    Formulation formulation = Formulation::A;
    data::Dataset dataset;
    int alpha = 1;
    score::ParamBox box;
    std::vector<double> big_m;
    double delta = 1e-6;
    int q = 0;
    lp::LinearProgram base;        // bounds are the unfixed node bounds
    double objective_constant = 0.0;

    std::size_t n() const { return dataset.n(); }
    std::size_t k() const { return dataset.k(); }
    std::size_t p() const { return dataset.p(); }
    std::size_t num_binaries() const { return n() + p(); }
    std::size_t binary_var(std::size_t b) const {  // b in [0, n+p): d first, then e
        return k() + p() + (b < n() ? b : n() + (b - n()));
    }
};

MioProblem build_formulation_a(const data::Dataset& d, int alpha,
                               const score::ParamBox& box, const MioConfig& cfg);
MioProblem build_formulation_b(const data::Dataset& d, int alpha,
                               const score::ParamBox& box, const MioConfig& cfg);

SolveResult branch_and_bound(const MioProblem& prob, const MioConfig& cfg,
                             std::ostream* trace = nullptr,
                             std::optional<double> initial_lower_bound = std::nullopt);

// Solves both alpha sub-problems (alpha=-1 via negated x0) and returns the
// better incumbent; ties go to alpha=+1. An optional separate box may be given
// for the alpha=-1 sub-problem (used by the warm start, whose refinement is
// alpha-specific).
SolveResult solve_prescience(const data::Dataset& d, const score::ParamBox& box,
                             const MioConfig& cfg, std::ostream* trace = nullptr,
                             const score::ParamBox* box_minus = nullptr);

}  // namespace prescience::mio
