#include "prescience/warmstart.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "prescience/lp.hpp"

namespace prescience::warmstart {

namespace {

constexpr double kGradTol = 1e-8;
constexpr int kMaxIter = 100;
constexpr double kProbClip = 1e-6;

// design matrix (intercept, x0, x_tilde sans its intercept column, z)
Matrix logit_design(const data::Dataset& d) {
    const std::size_t n = d.n();
    const bool dup_intercept = d.intercept_col >= 0;
    const std::size_t k_eff = d.k() - (dup_intercept ? 1 : 0);
    Matrix X(n, 2 + k_eff + d.p());
    for (std::size_t i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = d.x0[i];
        std::size_t c = 2;
        for (std::size_t j = 0; j < d.k(); ++j) {
            if (static_cast<int>(j) == d.intercept_col) continue;
            X(i, c++) = d.x_tilde(i, j);
        }
        for (std::size_t j = 0; j < d.p(); ++j) X(i, c++) = d.z(i, j);
    }
    return X;
}

// drop collinear columns via pivoted elimination on the Gram matrix
std::vector<std::size_t> independent_columns(const Matrix& X) {
    const std::size_t m = X.cols, n = X.rows;
    Matrix G(m, m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += X(i, a) * X(i, b);
            G(a, b) = s;
        }
    std::vector<std::size_t> keep;
    Matrix L(m, m, 0.0);  // incremental Cholesky over accepted columns
    for (std::size_t c = 0; c < m; ++c) {
        const std::size_t r = keep.size();
        double diag = G(c, c);
        std::vector<double> row(r, 0.0);
        for (std::size_t j = 0; j < r; ++j) {
            double s = G(c, keep[j]);
            for (std::size_t t = 0; t < j; ++t) s -= row[t] * L(j, t);
            row[j] = s / L(j, j);
            diag -= row[j] * row[j];
        }
        if (diag <= 1e-10 * std::max(G(c, c), 1.0)) continue;  // collinear
        for (std::size_t j = 0; j < r; ++j) L(r, j) = row[j];
        L(r, r) = std::sqrt(diag);
        keep.push_back(c);
    }
    return keep;
}

double log_likelihood(const Matrix& X, const std::vector<std::size_t>& cols,
                      const std::vector<int>& y, const std::vector<double>& b) {
    double ll = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < cols.size(); ++j) eta += X(i, cols[j]) * b[j];
        // log(1+exp(eta)) computed stably
        const double lse = eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                                     : std::log1p(std::exp(eta));
        ll += y[i] * eta - lse;
    }
    return ll;
}

}  // namespace

LogitFit fit_logit(const data::Dataset& d) {
    const Matrix X = logit_design(d);
    const auto cols = independent_columns(X);
    const std::size_t m = cols.size();
    const std::size_t n = X.rows;
    if (m == 0) throw ArgumentError("fit_logit: design matrix has rank zero");

    std::vector<double> b(m, 0.0);
    LogitFit fit;
    double max_eta = 0.0;
    double grad_norm = lp::kInf;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        fit.iterations = iter + 1;
        std::vector<double> eta(n, 0.0), prob(n), wdiag(n), grad(m, 0.0);
        max_eta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) eta[i] += X(i, cols[j]) * b[j];
            max_eta = std::max(max_eta, std::abs(eta[i]));
            prob[i] = 1.0 / (1.0 + std::exp(-eta[i]));
            wdiag[i] = prob[i] * (1.0 - prob[i]);
        }
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i)
                grad[j] += X(i, cols[j]) * (d.y[i] - prob[i]);
        grad_norm = 0.0;
        for (double g : grad) grad_norm = std::max(grad_norm, std::abs(g));
        if (grad_norm < kGradTol) {
            fit.converged = true;
            break;
        }
        if (max_eta > 30.0) break;  // heading into separation

        Matrix H(m, m, 0.0);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t c = a; c < m; ++c) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    s += wdiag[i] * X(i, cols[a]) * X(i, cols[c]);
                H(a, c) = H(c, a) = s;
            }
        auto step = lp::solve_linear_system(H, grad);
        if (!step) break;

        const double ll0 = log_likelihood(X, cols, d.y, b);
        double scale = 1.0;
        std::vector<double> trial(m);
        bool improved = false;
        for (int h = 0; h < 30; ++h) {
            for (std::size_t j = 0; j < m; ++j) trial[j] = b[j] + scale * (*step)[j];
            if (log_likelihood(X, cols, d.y, trial) >= ll0) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;
        b = trial;
    }

    if (!fit.converged && max_eta > 30.0 && grad_norm >= kGradTol) {
        fit.separation = true;
        std::cerr << "[warmstart] warning: perfect separation detected in logit fit; "
                     "probabilities clipped\n";
    }

    fit.coefficients.assign(X.cols, 0.0);
    for (std::size_t j = 0; j < m; ++j) fit.coefficients[cols[j]] = b[j];
    fit.fitted_probabilities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < m; ++j) eta += X(i, cols[j]) * b[j];
        double pr = 1.0 / (1.0 + std::exp(-eta));
        pr = std::min(std::max(pr, kProbClip), 1.0 - kProbClip);
        fit.fitted_probabilities[i] = pr;
    }
    return fit;
}

RefinedSpace tighten_bounds(const data::Dataset& d, int alpha,
                            const score::ParamBox& base_box,
                            const std::vector<double>& probs) {
    const std::size_t k = d.k(), p = d.p(), n = d.n();
    if (probs.size() != n) throw ArgumentError("tighten_bounds: probability length mismatch");
    if (base_box.beta_bounds.size() != k || base_box.gamma_bounds.size() != p)
        throw ArgumentError("tighten_bounds: box dimension mismatch");

    const std::size_t dim = k + p;
    RefinedSpace out;
    out.l_hat.assign(dim, 0.0);
    out.u_hat.assign(dim, 0.0);

    auto joint = base_box.joint();  // running bounds, tightened as we go

    // sign-matching rows: sgn_i * w~_i' t >= -sgn_i * alpha * x0_i
    // (P = 0.5 exactly contributes nothing)
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i)
        if (probs[i] != 0.5) active.push_back(i);

    lp::LinearProgram base;
    for (std::size_t j = 0; j < dim; ++j)
        base.add_variable(joint[j].first, joint[j].second);
    base.rows = Matrix(active.size(), dim);
    for (std::size_t r = 0; r < active.size(); ++r) {
        const std::size_t i = active[r];
        const double sgn = probs[i] > 0.5 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < k; ++j) base.rows(r, j) = sgn * d.x_tilde(i, j);
        for (std::size_t j = 0; j < p; ++j) base.rows(r, k + j) = sgn * d.z(i, j);
        base.senses.push_back(lp::Sense::GreaterEqual);
        base.rhs.push_back(-sgn * alpha * d.x0[i]);
    }

    for (std::size_t j = 0; j < dim; ++j) {
        lp::LinearProgram lpj = base;
        for (std::size_t s = 0; s < dim; ++s) {
            lpj.lower[s] = joint[s].first;
            lpj.upper[s] = joint[s].second;
        }
        lpj.objective.assign(dim, 0.0);
        lpj.objective[j] = -1.0;  // minimize t_j
        auto low = lp::solve_lp(lpj);
        ++out.lp_calls;
        if (low.status != lp::LpStatus::Optimal) return out;  // feasible = false
        out.l_hat[j] = low.x[j];

        lpj.objective[j] = 1.0;
        lpj.lower[j] = out.l_hat[j];  // t_j >= l_hat_j for the upper bound LP
        auto high = lp::solve_lp(lpj);
        ++out.lp_calls;
        if (high.status != lp::LpStatus::Optimal) return out;
        out.u_hat[j] = high.x[j];

        joint[j] = {out.l_hat[j], out.u_hat[j]};  // imposed on later coordinates
    }
    out.feasible = true;
    return out;
}

score::ParamBox enlarge(const RefinedSpace& r, const score::ParamBox& base_box,
                        double tau) {
    if (!r.feasible)
        throw ArgumentError("enlarge: refined space is infeasible");
    if (tau < 1.0) throw ArgumentError("enlarge: tau must be at least 1");
    const std::size_t k = base_box.beta_bounds.size();
    const std::size_t dim = r.l_hat.size();
    score::ParamBox out = base_box;
    for (std::size_t j = 0; j < dim; ++j) {
        const double half = tau * std::max(std::abs(r.l_hat[j]), std::abs(r.u_hat[j]));
        auto& b = j < k ? out.beta_bounds[j] : out.gamma_bounds[j - k];
        b.first = std::max(b.first, -half);
        b.second = std::min(b.second, half);
    }
    return out;
}

}  // namespace prescience::warmstart
