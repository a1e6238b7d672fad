#include "prescience/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace prescience::lp {

namespace {

enum class VarStatus { Basic, AtLower, AtUpper, Free };

struct Tableau {
    std::size_t m = 0;  // rows
    std::size_t N = 0;  // total variables (structural + slack + artificial)
    std::vector<double> T;      // m x N, T = B^{-1} A
    std::vector<double> xB;     // basic variable values, per row
    std::vector<std::size_t> basis;
    std::vector<VarStatus> stat;
    std::vector<double> val;    // nonbasic variable values
    std::vector<double> lo, hi;
    std::vector<double> dred;   // reduced costs for the current phase
    std::vector<double> cost;   // current phase costs

    double& t(std::size_t i, std::size_t j) { return T[i * N + j]; }
    double tc(std::size_t i, std::size_t j) const { return T[i * N + j]; }
};

void compute_reduced_costs(Tableau& tb) {
    tb.dred = tb.cost;
    for (std::size_t r = 0; r < tb.m; ++r) {
        const double cb = tb.cost[tb.basis[r]];
        if (cb == 0.0) continue;
        const double* row = &tb.T[r * tb.N];
        for (std::size_t j = 0; j < tb.N; ++j) tb.dred[j] -= cb * row[j];
    }
}

// returns N when no eligible entering variable exists
std::size_t choose_entering(const Tableau& tb, bool bland) {
    std::size_t best = tb.N;
    double best_score = kFeasTol;
    for (std::size_t j = 0; j < tb.N; ++j) {
        if (tb.stat[j] == VarStatus::Basic) continue;
        if (tb.lo[j] == tb.hi[j]) continue;  // fixed, can never move
        const double d = tb.dred[j];
        double score = 0.0;
        switch (tb.stat[j]) {
            case VarStatus::AtLower: score = d; break;
            case VarStatus::AtUpper: score = -d; break;
            case VarStatus::Free: score = std::abs(d); break;
            case VarStatus::Basic: break;
        }
        if (score > best_score) {
            if (bland) return j;
            best = j;
            best_score = score;
        }
    }
    return best;
}

enum class StepKind { Flip, Pivot, Unbounded };

struct RatioResult {
    StepKind kind;
    double t = 0.0;
    std::size_t row = 0;      // leaving row for Pivot
    bool leaves_at_upper = false;
};

RatioResult ratio_test(const Tableau& tb, std::size_t q, double sigma) {
    RatioResult res;
    res.kind = StepKind::Flip;
    double tmax = kInf;
    if (std::isfinite(tb.lo[q]) && std::isfinite(tb.hi[q]))
        tmax = tb.hi[q] - tb.lo[q];
    res.t = tmax;

    for (std::size_t r = 0; r < tb.m; ++r) {
        const double g = sigma * tb.tc(r, q);
        if (std::abs(g) <= kPivotTol) continue;
        const std::size_t b = tb.basis[r];
        double limit;
        bool to_upper;
        if (g > 0.0) {
            // basic decreases toward its lower bound
            if (!std::isfinite(tb.lo[b])) continue;
            limit = (tb.xB[r] - tb.lo[b]) / g;
            to_upper = false;
        } else {
            if (!std::isfinite(tb.hi[b])) continue;
            limit = (tb.hi[b] - tb.xB[r]) / (-g);
            to_upper = true;
        }
        if (limit < -1e-12) limit = 0.0;
        if (limit < res.t - 1e-12 ||
            (limit < res.t + 1e-12 && res.kind == StepKind::Pivot &&
             tb.basis[r] < tb.basis[res.row])) {
            res.kind = StepKind::Pivot;
            res.t = std::max(limit, 0.0);
            res.row = r;
            res.leaves_at_upper = to_upper;
        }
    }
    if (!std::isfinite(res.t)) res.kind = StepKind::Unbounded;
    return res;
}

void apply_step(Tableau& tb, std::size_t q, double sigma, const RatioResult& rr) {
    const double dx = sigma * rr.t;
    if (rr.kind == StepKind::Flip) {
        for (std::size_t r = 0; r < tb.m; ++r) {
            const double a = tb.tc(r, q);
            if (a != 0.0) tb.xB[r] -= a * dx;
        }
        tb.val[q] += dx;
        tb.stat[q] = (tb.stat[q] == VarStatus::AtLower) ? VarStatus::AtUpper
                                                        : VarStatus::AtLower;
        return;
    }

    const std::size_t r = rr.row;
    const std::size_t leaving = tb.basis[r];

    for (std::size_t i = 0; i < tb.m; ++i) {
        if (i == r) continue;
        const double a = tb.tc(i, q);
        if (a != 0.0) tb.xB[i] -= a * dx;
    }
    const double entering_val = tb.val[q] + dx;

    // leaving variable lands exactly on the bound it hit
    tb.val[leaving] = rr.leaves_at_upper ? tb.hi[leaving] : tb.lo[leaving];
    tb.stat[leaving] = rr.leaves_at_upper ? VarStatus::AtUpper : VarStatus::AtLower;

    // eliminate column q from all rows but r
    const double piv = tb.t(r, q);
    double* prow = &tb.T[r * tb.N];
    const double inv = 1.0 / piv;
    for (std::size_t j = 0; j < tb.N; ++j) prow[j] *= inv;
    for (std::size_t i = 0; i < tb.m; ++i) {
        if (i == r) continue;
        const double f = tb.tc(i, q);
        if (f == 0.0) continue;
        double* irow = &tb.T[i * tb.N];
        for (std::size_t j = 0; j < tb.N; ++j) irow[j] -= f * prow[j];
        irow[q] = 0.0;
    }
    const double dq = tb.dred[q];
    if (dq != 0.0) {
        for (std::size_t j = 0; j < tb.N; ++j) tb.dred[j] -= dq * prow[j];
        tb.dred[q] = 0.0;
    }

    tb.basis[r] = q;
    tb.stat[q] = VarStatus::Basic;
    tb.xB[r] = entering_val;
}

// returns true on optimality, false on unboundedness
bool run_simplex(Tableau& tb, long& iterations, long max_iter, long bland_after) {
    for (;;) {
        if (iterations >= max_iter)
            throw NumericError("simplex iteration limit exceeded", iterations);
        const bool bland = iterations >= bland_after;
        const std::size_t q = choose_entering(tb, bland);
        if (q == tb.N) return true;
        double sigma = 1.0;
        if (tb.stat[q] == VarStatus::AtUpper) sigma = -1.0;
        else if (tb.stat[q] == VarStatus::Free) sigma = (tb.dred[q] > 0.0) ? 1.0 : -1.0;
        const RatioResult rr = ratio_test(tb, q, sigma);
        if (rr.kind == StepKind::Unbounded) return false;
        if (rr.kind == StepKind::Pivot && std::abs(tb.tc(rr.row, q)) <= kPivotTol)
            throw NumericError("simplex pivot below tolerance", iterations);
        apply_step(tb, q, sigma, rr);
        ++iterations;
    }
}

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    const std::size_t m = lp.num_rows();
    if (lp.rows.rows != m || (m > 0 && lp.rows.cols != n) || lp.senses.size() != m ||
        lp.lower.size() != n || lp.upper.size() != n)
        throw ArgumentError("solve_lp: inconsistent problem dimensions");
    for (std::size_t j = 0; j < n; ++j)
        if (lp.lower[j] > lp.upper[j])
            throw ArgumentError("solve_lp: variable with lower bound above upper bound");

    std::size_t n_slack = 0;
    for (auto s : lp.senses)
        if (s != Sense::Equal) ++n_slack;

    Tableau tb;
    tb.m = m;
    // worst case: one artificial per row
    const std::size_t Nmax = n + n_slack + m;

    // variable metadata; artificials appended as discovered
    tb.lo.assign(Nmax, 0.0);
    tb.hi.assign(Nmax, kInf);
    tb.val.assign(Nmax, 0.0);
    tb.stat.assign(Nmax, VarStatus::AtLower);
    for (std::size_t j = 0; j < n; ++j) {
        tb.lo[j] = lp.lower[j];
        tb.hi[j] = lp.upper[j];
        if (std::isfinite(lp.lower[j])) {
            tb.stat[j] = VarStatus::AtLower;
            tb.val[j] = lp.lower[j];
        } else if (std::isfinite(lp.upper[j])) {
            tb.stat[j] = VarStatus::AtUpper;
            tb.val[j] = lp.upper[j];
        } else {
            tb.stat[j] = VarStatus::Free;
            tb.val[j] = 0.0;
        }
    }

    // equality form rows: structural coefficients plus slack column
    std::vector<std::size_t> slack_col(m, Nmax);
    std::vector<double> slack_sign(m, 0.0);
    {
        std::size_t next = n;
        for (std::size_t r = 0; r < m; ++r) {
            if (lp.senses[r] == Sense::Equal) continue;
            slack_col[r] = next++;
            slack_sign[r] = (lp.senses[r] == Sense::LessEqual) ? 1.0 : -1.0;
        }
    }

    const std::size_t base_vars = n + n_slack;
    std::vector<std::size_t> art_col(m, Nmax);
    std::size_t n_art = 0;

    // choose initial basis: the row's slack if it can sit feasibly, else an
    // artificial carrying the residual
    std::vector<double> sigma_row(m, 1.0);
    tb.basis.assign(m, 0);
    tb.xB.assign(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        double resid = lp.rhs[r];
        for (std::size_t j = 0; j < n; ++j) resid -= lp.rows(r, j) * tb.val[j];
        bool use_slack = false;
        if (slack_col[r] != Nmax) {
            const double v = slack_sign[r] * resid;  // slack value with others at bounds
            if (v >= 0.0) use_slack = true;
        }
        if (use_slack) {
            tb.basis[r] = slack_col[r];
            sigma_row[r] = slack_sign[r];
            tb.xB[r] = slack_sign[r] * resid;
            tb.stat[slack_col[r]] = VarStatus::Basic;
        } else {
            const std::size_t a = base_vars + n_art++;
            art_col[r] = a;
            const double sgn = (resid >= 0.0) ? 1.0 : -1.0;
            tb.basis[r] = a;
            sigma_row[r] = sgn;
            tb.xB[r] = sgn * resid;
            tb.stat[a] = VarStatus::Basic;
            tb.lo[a] = 0.0;
            tb.hi[a] = kInf;
        }
    }

    tb.N = base_vars + n_art;
    tb.T.assign(m * tb.N, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const double s = sigma_row[r];
        for (std::size_t j = 0; j < n; ++j) tb.t(r, j) = s * lp.rows(r, j);
        if (slack_col[r] != Nmax) tb.t(r, slack_col[r]) = s * slack_sign[r];
        if (art_col[r] != Nmax) tb.t(r, art_col[r]) = 1.0;
    }
    tb.lo.resize(tb.N);
    tb.hi.resize(tb.N);
    tb.val.resize(tb.N);
    tb.stat.resize(tb.N);

    LpOutcome out;
    long iterations = 0;
    const long bland_after = 5 * static_cast<long>(m + tb.N);
    const long max_iter = 200 * static_cast<long>(m + tb.N) + 2000;

    if (n_art > 0) {
        tb.cost.assign(tb.N, 0.0);
        for (std::size_t a = base_vars; a < tb.N; ++a) tb.cost[a] = -1.0;
        compute_reduced_costs(tb);
        run_simplex(tb, iterations, max_iter, bland_after);  // phase 1 cannot be unbounded
        double p1 = 0.0;
        for (std::size_t r = 0; r < m; ++r)
            if (tb.basis[r] >= base_vars) p1 += tb.xB[r];
        if (p1 > 1e-7) {
            out.status = LpStatus::Infeasible;
            out.iterations = iterations;
            return out;
        }
        // pin artificials at zero for phase 2
        for (std::size_t a = base_vars; a < tb.N; ++a) {
            tb.lo[a] = 0.0;
            tb.hi[a] = 0.0;
            if (tb.stat[a] != VarStatus::Basic) {
                tb.stat[a] = VarStatus::AtLower;
                tb.val[a] = 0.0;
            }
        }
    }

    tb.cost.assign(tb.N, 0.0);
    for (std::size_t j = 0; j < n; ++j) tb.cost[j] = lp.objective[j];
    compute_reduced_costs(tb);
    const bool optimal = run_simplex(tb, iterations, max_iter, bland_after);
    out.iterations = iterations;
    if (!optimal) {
        out.status = LpStatus::Unbounded;
        return out;
    }

    out.status = LpStatus::Optimal;
    out.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        if (tb.stat[j] != VarStatus::Basic) out.x[j] = tb.val[j];
    for (std::size_t r = 0; r < m; ++r)
        if (tb.basis[r] < n) out.x[tb.basis[r]] = tb.xB[r];
    // clamp roundoff back into the box
    for (std::size_t j = 0; j < n; ++j)
        out.x[j] = std::min(std::max(out.x[j], lp.lower[j]), lp.upper[j]);
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * out.x[j];
    out.objective_value = obj;
    return out;
}

double box_linear_abs_max(double c0, const std::vector<double>& c,
                          const std::vector<std::pair<double, double>>& box) {
    if (c.size() != box.size())
        throw ArgumentError("box_linear_abs_max: coefficient/box size mismatch");
    double pos = c0, neg = -c0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const auto [lo, hi] = box[j];
        pos += std::max(c[j] * lo, c[j] * hi);
        neg += std::max(-c[j] * lo, -c[j] * hi);
    }
    return std::max(pos, neg);
}

std::optional<std::vector<double>> solve_linear_system(Matrix A, std::vector<double> b) {
    const std::size_t d = b.size();
    if (A.rows != d || A.cols != d)
        throw ArgumentError("solve_linear_system: dimension mismatch");
    double amax = 0.0;
    for (double v : A.a) amax = std::max(amax, std::abs(v));
    const double tol = 1e-10 * std::max(amax, 1e-300);

    for (std::size_t k = 0; k < d; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < d; ++i)
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        if (std::abs(A(piv, k)) < tol) return std::nullopt;
        if (piv != k) {
            for (std::size_t j = 0; j < d; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < d; ++i) {
            const double f = A(i, k) / A(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < d; ++j) A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(d, 0.0);
    for (std::size_t i = d; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < d; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

Matrix cholesky(const Matrix& S) {
    const std::size_t d = S.rows;
    if (S.cols != d) throw ArgumentError("cholesky: matrix not square");
    Matrix L(d, d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = S(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                if (s <= 0.0)
                    throw DecompositionError("cholesky: matrix not positive definite");
                L(i, i) = std::sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

}  // namespace prescience::lp
