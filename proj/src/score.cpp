#include "prescience/score.hpp"

#include <cmath>

#include "prescience/lp.hpp"

namespace prescience::score {

double ParamBox::log_volume() const {
    double lv = 0.0;
    auto acc = [&](const std::vector<std::pair<double, double>>& bounds) {
        for (const auto& [lo, hi] : bounds) lv += std::log(hi - lo);
    };
    acc(beta_bounds);
    acc(gamma_bounds);
    return lv;
}

double index_value(const Coefficients& c, const data::Dataset& d, std::size_t i) {
    double v = c.alpha * d.x0[i];
    for (std::size_t j = 0; j < d.k(); ++j) v += d.x_tilde(i, j) * c.beta[j];
    for (std::size_t j = 0; j < d.p(); ++j) v += d.z(i, j) * c.gamma[j];
    return v;
}

static void check_dims(const Coefficients& c, const data::Dataset& d) {
    if (c.alpha != 1 && c.alpha != -1)
        throw ArgumentError("coefficients: alpha must be -1 or +1");
    if (c.beta.size() != d.k() || c.gamma.size() != d.p())
        throw ArgumentError("coefficients: dimension mismatch with dataset");
}

std::vector<int> predict(const Coefficients& c, const data::Dataset& d) {
    check_dims(c, d);
    std::vector<int> out(d.n());
    for (std::size_t i = 0; i < d.n(); ++i)
        out[i] = index_value(c, d, i) >= 0.0 ? 1 : 0;
    return out;
}

double empirical_score(const Coefficients& c, const data::Dataset& d) {
    check_dims(c, d);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        const int pred = index_value(c, d, i) >= 0.0 ? 1 : 0;
        if (pred == d.y[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(d.n());
}

std::size_t l0_norm(const std::vector<double>& gamma, double tol) {
    if (tol <= 0.0) throw ArgumentError("l0_norm: tolerance must be positive");
    std::size_t c = 0;
    for (double g : gamma)
        if (std::abs(g) > tol) ++c;
    return c;
}

std::vector<double> compute_big_m(const data::Dataset& d, int alpha, const ParamBox& box) {
    if (box.beta_bounds.size() != d.k() || box.gamma_bounds.size() != d.p())
        throw ArgumentError("compute_big_m: box dimension mismatch");
    const auto joint = box.joint();
    std::vector<double> coeffs(d.k() + d.p());
    std::vector<double> m(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) {
        for (std::size_t j = 0; j < d.k(); ++j) coeffs[j] = d.x_tilde(i, j);
        for (std::size_t j = 0; j < d.p(); ++j) coeffs[d.k() + j] = d.z(i, j);
        m[i] = lp::box_linear_abs_max(alpha * d.x0[i], coeffs, joint);
    }
    return m;
}

}  // namespace prescience::score
