#pragma once

#include <utility>
#include <vector>

#include "prescience/data.hpp"

namespace prescience::score {

// One candidate prediction rule 1{alpha*x0 + x~'beta + z'gamma >= 0}.
struct Coefficients {
    int alpha = 1;  // in {-1,+1}
    std::vector<double> beta;
    std::vector<double> gamma;
};

// Per-coordinate bounds on (beta, gamma); the box search space.
struct ParamBox {
    std::vector<std::pair<double, double>> beta_bounds;
    std::vector<std::pair<double, double>> gamma_bounds;

    static ParamBox cube(std::size_t k, std::size_t p, double half_width) {
        ParamBox b;
        b.beta_bounds.assign(k, {-half_width, half_width});
        b.gamma_bounds.assign(p, {-half_width, half_width});
        return b;
    }

    std::vector<std::pair<double, double>> joint() const {
        auto all = beta_bounds;
        all.insert(all.end(), gamma_bounds.begin(), gamma_bounds.end());
        return all;
    }

    // log-volume; coordinates of zero width contribute -inf
    double log_volume() const;
};

inline constexpr double kSelectionTol = 1e-6;

double index_value(const Coefficients& c, const data::Dataset& d, std::size_t i);

// entry i is 1 iff the index is >= 0 (boundary predicts 1)
std::vector<int> predict(const Coefficients& c, const data::Dataset& d);

// fraction of observations with y_i equal to the prediction; exact multiple of 1/n
double empirical_score(const Coefficients& c, const data::Dataset& d);

// number of coordinates with |gamma_j| strictly greater than tol
std::size_t l0_norm(const std::vector<double>& gamma, double tol = kSelectionTol);

// M_i = max over the box of |alpha*x0_i + x~_i'beta + z_i'gamma|
std::vector<double> compute_big_m(const data::Dataset& d, int alpha, const ParamBox& box);

}  // namespace prescience::score
