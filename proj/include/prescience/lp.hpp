#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "prescience/core.hpp"

namespace prescience::lp {

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kPivotTol = 1e-11;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, GreaterEqual, Equal };

enum class LpStatus { Optimal, Infeasible, Unbounded };

// maximize objective . x  subject to  rows x {<=,>=,=} rhs,  lower <= x <= upper
struct LinearProgram {
    std::vector<double> objective;
    Matrix rows;
    std::vector<Sense> senses;
    std::vector<double> rhs;
    std::vector<double> lower;  // may be -inf
    std::vector<double> upper;  // may be +inf

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_rows() const { return rhs.size(); }

    std::size_t add_variable(double lo, double hi, double obj = 0.0) {
        objective.push_back(obj);
        lower.push_back(lo);
        upper.push_back(hi);
        return objective.size() - 1;
    }
};

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;        // valid when Optimal
    double objective_value = 0.0; // valid when Optimal
    long iterations = 0;
};

// Dense two-phase bounded-variable simplex. Dantzig pricing with a switch to
// Bland's rule after 5*(m+n) iterations. Deterministic: all ties break on the
// lowest variable/row index.
LpOutcome solve_lp(const LinearProgram& lp);

// max over t in box of |c0 + c.t|, closed form over the box corners.
double box_linear_abs_max(double c0, const std::vector<double>& c,
                          const std::vector<std::pair<double, double>>& box);

// Gaussian elimination with partial pivoting; nullopt when a pivot falls
// below 1e-10 * max|A|.
std::optional<std::vector<double>> solve_linear_system(Matrix A, std::vector<double> b);

// Lower-triangular L with L L' = S; throws DecompositionError when S is not
// positive definite.
Matrix cholesky(const Matrix& S);

}  // namespace prescience::lp
