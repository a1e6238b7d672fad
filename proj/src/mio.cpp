#include "prescience/mio.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <queue>
#include <set>
#include <vector>

namespace prescience::mio {

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kBoundTol = 1e-9;
constexpr double kImproveTol = 1e-12;

void check_build_inputs(const data::Dataset& d, const score::ParamBox& box,
                        const MioConfig& cfg) {
    if (cfg.q < 0 || static_cast<std::size_t>(cfg.q) > d.p())
        throw ArgumentError("mio: q must lie in [0, p]");
    if (cfg.delta <= 0.0) throw ArgumentError("mio: delta must be positive");
    if (cfg.epsilon < 0.0) throw ArgumentError("mio: epsilon must be nonnegative");
    if (box.beta_bounds.size() != d.k() || box.gamma_bounds.size() != d.p())
        throw ArgumentError("mio: box dimension mismatch");
}

void add_selection_and_cardinality(MioProblem& prob) {
    const std::size_t k = prob.k(), p = prob.p(), n = prob.n();
    auto& lp = prob.base;
    const std::size_t nv = lp.num_vars();
    const std::size_t row0 = lp.rhs.size();
    const std::size_t extra = 2 * p + 1;
    Matrix rows(row0 + extra, nv);
    for (std::size_t r = 0; r < row0; ++r)
        for (std::size_t j = 0; j < nv; ++j) rows(r, j) = lp.rows(r, j);

    std::size_t r = row0;
    for (std::size_t j = 0; j < p; ++j) {
        const std::size_t gam = k + j;
        const std::size_t ej = k + p + n + j;
        // e_j * lo_j <= gamma_j
        rows(r, gam) = 1.0;
        rows(r, ej) = -prob.box.gamma_bounds[j].first;
        lp.senses.push_back(lp::Sense::GreaterEqual);
        lp.rhs.push_back(0.0);
        ++r;
        // gamma_j <= e_j * hi_j
        rows(r, gam) = 1.0;
        rows(r, ej) = -prob.box.gamma_bounds[j].second;
        lp.senses.push_back(lp::Sense::LessEqual);
        lp.rhs.push_back(0.0);
        ++r;
    }
    for (std::size_t j = 0; j < p; ++j) rows(r, k + p + n + j) = 1.0;
    lp.senses.push_back(lp::Sense::LessEqual);
    lp.rhs.push_back(static_cast<double>(prob.q));
    lp.rows = std::move(rows);
}

MioProblem build_common(const data::Dataset& d, int alpha, const score::ParamBox& box,
                        const MioConfig& cfg, Formulation form) {
    check_build_inputs(d, box, cfg);
    MioProblem prob;
    prob.formulation = form;
    prob.dataset = d;
    prob.alpha = alpha;
    prob.box = box;
    prob.delta = cfg.delta;
    prob.q = cfg.q;
    prob.big_m = score::compute_big_m(d, alpha, box);
    for (double m : prob.big_m)
        if (!std::isfinite(m)) throw ArgumentError("mio: non-finite big-M value");

    auto& lp = prob.base;
    const std::size_t k = d.k(), p = d.p(), n = d.n();
    for (std::size_t j = 0; j < k; ++j)
        lp.add_variable(box.beta_bounds[j].first, box.beta_bounds[j].second);
    for (std::size_t j = 0; j < p; ++j)
        lp.add_variable(box.gamma_bounds[j].first, box.gamma_bounds[j].second);
    for (std::size_t i = 0; i < n; ++i) lp.add_variable(0.0, 1.0);
    for (std::size_t j = 0; j < p; ++j) lp.add_variable(0.0, 1.0);
    return prob;
}

}  // namespace

MioProblem build_formulation_a(const data::Dataset& d, int alpha,
                               const score::ParamBox& box, const MioConfig& cfg) {
    MioProblem prob = build_common(d, alpha, box, cfg, Formulation::A);
    const std::size_t k = d.k(), p = d.p(), n = d.n();
    auto& lp = prob.base;
    const std::size_t nv = lp.num_vars();

    lp.rows = Matrix(2 * n, nv);
    lp.senses.clear();
    lp.rhs.clear();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = alpha * d.x0[i];
        const std::size_t di = k + p + i;
        // (d_i - 1) M_i <= idx_i   <=>   x~'b + z'g - M_i d_i >= -M_i - a_i
        for (std::size_t j = 0; j < k; ++j) lp.rows(2 * i, j) = d.x_tilde(i, j);
        for (std::size_t j = 0; j < p; ++j) lp.rows(2 * i, k + j) = d.z(i, j);
        lp.rows(2 * i, di) = -prob.big_m[i];
        lp.senses.push_back(lp::Sense::GreaterEqual);
        lp.rhs.push_back(-prob.big_m[i] - a);
        // idx_i <= d_i (M_i + delta) - delta
        for (std::size_t j = 0; j < k; ++j) lp.rows(2 * i + 1, j) = d.x_tilde(i, j);
        for (std::size_t j = 0; j < p; ++j) lp.rows(2 * i + 1, k + j) = d.z(i, j);
        lp.rows(2 * i + 1, di) = -(prob.big_m[i] + cfg.delta);
        lp.senses.push_back(lp::Sense::LessEqual);
        lp.rhs.push_back(-cfg.delta - a);

        lp.objective[di] = (2.0 * d.y[i] - 1.0) * inv_n;
        prob.objective_constant += (1.0 - d.y[i]) * inv_n;
    }
    add_selection_and_cardinality(prob);
    return prob;
}

MioProblem build_formulation_b(const data::Dataset& d, int alpha,
                               const score::ParamBox& box, const MioConfig& cfg) {
    MioProblem prob = build_common(d, alpha, box, cfg, Formulation::B);
    const std::size_t k = d.k(), p = d.p(), n = d.n();

    {
        // the equivalence to the score objective needs a continuously
        // distributed index; zeros or ties in x0 are the red flag
        std::vector<double> sorted(d.x0);
        std::sort(sorted.begin(), sorted.end());
        const bool ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
        const bool zeros = std::find(sorted.begin(), sorted.end(), 0.0) != sorted.end();
        if (ties || zeros)
            std::cerr << "[mio] warning: x0 has "
                      << (ties ? "tied values" : "zero values")
                      << "; formulation B may not match the score objective\n";
    }

    auto& lp = prob.base;
    const std::size_t nv = lp.num_vars();
    lp.rows = Matrix(n, nv);
    lp.senses.clear();
    lp.rhs.clear();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = 1.0 - 2.0 * d.y[i];
        const double a = alpha * d.x0[i];
        const std::size_t di = k + p + i;
        // (1-2y_i)(a_i + x~'b + z'g) <= M_i (1 - d_i)
        for (std::size_t j = 0; j < k; ++j) lp.rows(i, j) = s * d.x_tilde(i, j);
        for (std::size_t j = 0; j < p; ++j) lp.rows(i, k + j) = s * d.z(i, j);
        lp.rows(i, di) = prob.big_m[i];
        lp.senses.push_back(lp::Sense::LessEqual);
        lp.rhs.push_back(prob.big_m[i] - s * a);

        lp.objective[di] = inv_n;
    }
    add_selection_and_cardinality(prob);
    return prob;
}

namespace {

struct Node {
    std::vector<std::int8_t> fixes;  // -1 free, 0, 1; over the n+p binaries
    double bound = 0.0;
    int depth = 0;
    long id = 0;
    std::size_t branch_var = 0;      // binary index chosen at creation
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;  // larger bound first
        return a.id > b.id;                                // then older first
    }
};

class Bnb {
public:
    Bnb(const MioProblem& prob, const MioConfig& cfg, std::ostream* trace)
        : prob_(prob), cfg_(cfg), trace_(trace),
          nb_(prob.num_binaries()), n_(prob.n()) {}

    SolveResult run(std::optional<double> initial_lower_bound) {
        const auto t0 = std::chrono::steady_clock::now();
        if (initial_lower_bound) lower_bound_ = *initial_lower_bound;

        SolveResult res;
        std::vector<std::int8_t> root(nb_, -1);
        auto maybe_root = process_node(std::move(root), 0, lp::kInf);
        if (maybe_root) push_node(std::move(*maybe_root));

        SolveStatus status = SolveStatus::Optimal;
        for (;;) {
            if (open_empty()) break;
            const double bound_max = open_bound_max();
            if (bound_max - lower_bound_ <= cfg_.epsilon + kBoundTol) {
                status = (bound_max - lower_bound_ <= kBoundTol) ? SolveStatus::Optimal
                                                                 : SolveStatus::GapReached;
                final_bound_ = bound_max;
                break;
            }
            if (cfg_.node_limit >= 0 && nodes_ >= cfg_.node_limit) {
                status = SolveStatus::NodeLimit;
                final_bound_ = bound_max;
                break;
            }
            if (cfg_.time_limit >= 0.0) {
                const double el = std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0).count();
                if (el >= cfg_.time_limit) {
                    status = SolveStatus::TimeLimit;
                    final_bound_ = bound_max;
                    break;
                }
            }

            Node node = pop_node();
            if (node.bound <= lower_bound_ + kBoundTol) {
                log(node.depth, node.bound, "pruned-bound");
                continue;
            }
            std::optional<Node> children[2];
            for (int v = 0; v <= 1; ++v) {
                auto fixes = node.fixes;
                fixes[node.branch_var] = static_cast<std::int8_t>(v);
                children[v] = process_node(std::move(fixes), node.depth + 1, node.bound);
            }
            if (cfg_.node_selection == NodeSelection::DepthFirst) {
                // push One first so the Zero child is explored first
                if (children[1]) push_node(std::move(*children[1]));
                if (children[0]) push_node(std::move(*children[0]));
            } else {
                if (children[0]) push_node(std::move(*children[0]));
                if (children[1]) push_node(std::move(*children[1]));
            }
        }

        if (open_empty() && status == SolveStatus::Optimal)
            final_bound_ = std::max(lower_bound_, incumbent_found_ ? incumbent_score_
                                                                   : lower_bound_);

        res.nodes_explored = nodes_;
        res.has_incumbent = incumbent_found_;
        res.coefficients = incumbent_;
        if (!incumbent_found_ && open_empty() && lower_bound_ == -lp::kInf) {
            res.status = SolveStatus::Infeasible;
            res.wall_seconds = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - t0).count();
            return res;
        }
        res.score = incumbent_found_ ? incumbent_score_ : lower_bound_;
        res.best_bound = std::max(final_bound_, res.score);
        res.mio_gap = std::max(0.0, res.best_bound - res.score);
        if (res.mio_gap <= kBoundTol) {
            res.status = SolveStatus::Optimal;
        } else if (status == SolveStatus::NodeLimit || status == SolveStatus::TimeLimit) {
            res.status = status;
        } else {
            res.status = SolveStatus::GapReached;
        }
        res.wall_seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0).count();
        return res;
    }

private:
    bool open_empty() const { return heap_.empty() && stack_.empty(); }

    double open_bound_max() const { return *open_bounds_.rbegin(); }

    void push_node(Node n) {
        open_bounds_.insert(n.bound);
        if (cfg_.node_selection == NodeSelection::BestBound)
            heap_.push(std::move(n));
        else
            stack_.push_back(std::move(n));
    }

    Node pop_node() {
        Node n;
        if (cfg_.node_selection == NodeSelection::BestBound) {
            n = heap_.top();
            heap_.pop();
        } else {
            n = std::move(stack_.back());
            stack_.pop_back();
        }
        open_bounds_.erase(open_bounds_.find(n.bound));
        return n;
    }

    lp::LinearProgram node_lp(const std::vector<std::int8_t>& fixes) const {
        lp::LinearProgram lp = prob_.base;
        for (std::size_t b = 0; b < nb_; ++b) {
            if (fixes[b] < 0) continue;
            const std::size_t v = prob_.binary_var(b);
            lp.lower[v] = lp.upper[v] = static_cast<double>(fixes[b]);
        }
        return lp;
    }

    // refit for an all-integral node: binaries pinned and a slack margin t >= 0
    // maximized on the rows that assert correct-side classification, so the
    // returned (beta, gamma) sits strictly inside its prediction pattern
    // whenever possible and survives floating-point index re-evaluation
    lp::LinearProgram margin_lp(const std::vector<std::int8_t>& fixes) const {
        lp::LinearProgram lp = node_lp(fixes);
        const std::size_t nv = lp.num_vars();
        const std::size_t m = lp.num_rows();
        lp.objective.assign(nv, 0.0);
        const std::size_t tvar = lp.add_variable(0.0, 1.0, 1.0);
        Matrix rows(m, nv + 1);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t j = 0; j < nv; ++j) rows(r, j) = lp.rows(r, j);
        for (std::size_t i = 0; i < n_; ++i) {
            if (fixes[i] != 1) continue;  // d_i = 1 rows carry the margin
            if (prob_.formulation == Formulation::A)
                rows(2 * i, tvar) = -1.0;  // index - M_i d_i - t >= -M_i - a_i
            else
                rows(i, tvar) = 1.0;       // (1-2y_i) index + t <= M_i (1-d_i)
        }
        lp.rows = std::move(rows);
        return lp;
    }

    double tighten(double bound) const {
        // the true objective is a multiple of 1/n
        const double n = static_cast<double>(n_);
        return std::floor(n * bound + kBoundTol) / n;
    }

    score::Coefficients extract_coeffs(const std::vector<double>& x) const {
        score::Coefficients c;
        c.alpha = prob_.alpha;
        c.beta.assign(x.begin(), x.begin() + prob_.k());
        c.gamma.assign(x.begin() + prob_.k(), x.begin() + prob_.k() + prob_.p());
        return c;
    }

    // margin-consistent: every index either >= 0 or <= -delta, so the point is
    // feasible for the discretized problem and certificates stay exact. The
    // -delta side gets the LP feasibility tolerance as slack: a point that is
    // exactly on the margin in the LP's arithmetic can re-evaluate a few ULP
    // inside it. The slack (1e-9) stays far below delta (1e-6), so genuinely
    // in-between indices are still rejected.
    bool margin_consistent(const score::Coefficients& c) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const double idx = score::index_value(c, prob_.dataset, i);
            if (idx < 0.0 && idx > -prob_.delta + lp::kFeasTol) return false;
        }
        return true;
    }

    void offer_incumbent(const score::Coefficients& c) {
        if (score::l0_norm(c.gamma) > static_cast<std::size_t>(prob_.q)) return;
        if (!margin_consistent(c)) return;
        const double sc = score::empirical_score(c, prob_.dataset);
        if (sc > incumbent_score_ + kImproveTol || !incumbent_found_) {
            if (incumbent_found_ && sc <= incumbent_score_ + kImproveTol) return;
            incumbent_ = c;
            incumbent_score_ = sc;
            incumbent_found_ = true;
            lower_bound_ = std::max(lower_bound_, sc);
        }
    }

    // rounds the LP point to a feasible candidate: keep the q largest |gamma|
    void rounding_heuristic(const std::vector<double>& x) {
        score::Coefficients c = extract_coeffs(x);
        std::vector<std::size_t> order(c.gamma.size());
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double ma = std::abs(c.gamma[a]), mb = std::abs(c.gamma[b]);
            if (ma != mb) return ma > mb;
            return a < b;
        });
        for (std::size_t r = static_cast<std::size_t>(prob_.q); r < order.size(); ++r) {
            const std::size_t j = order[r];
            const auto& [lo, hi] = prob_.box.gamma_bounds[j];
            if (lo > 0.0 || hi < 0.0) return;  // cannot zero this coordinate
            c.gamma[j] = 0.0;
        }
        offer_incumbent(c);
    }

    std::optional<Node> process_node(std::vector<std::int8_t> fixes, int depth,
                                     double parent_bound) {
        ++nodes_;
        const auto lp_prob = node_lp(fixes);
        const auto out = lp::solve_lp(lp_prob);
        if (out.status != lp::LpStatus::Optimal) {
            log(depth, -lp::kInf, "infeasible");
            return std::nullopt;  // case (i)
        }
        double bound = tighten(out.objective_value + prob_.objective_constant);
        bound = std::min(bound, parent_bound);

        // integrality of the free binaries
        std::size_t branch_var = nb_;
        double best_frac = 0.5 - kIntTol;
        for (std::size_t b = 0; b < nb_; ++b) {
            const double v = out.x[prob_.binary_var(b)];
            const double dist = std::abs(v - 0.5);
            if (dist < best_frac) {
                best_frac = dist;
                branch_var = b;
            }
        }
        const bool integral = [&] {
            for (std::size_t b = 0; b < nb_; ++b) {
                const double v = out.x[prob_.binary_var(b)];
                if (std::min(v, 1.0 - v) > kIntTol) return false;
            }
            return true;
        }();

        if (integral) {
            // case (iii): re-solve with binaries pinned for clean coefficients
            auto fixed = fixes;
            for (std::size_t b = 0; b < nb_; ++b)
                fixed[b] = static_cast<std::int8_t>(
                    out.x[prob_.binary_var(b)] >= 0.5 ? 1 : 0);
            const auto refit = lp::solve_lp(margin_lp(fixed));
            if (refit.status == lp::LpStatus::Optimal)
                offer_incumbent(extract_coeffs(refit.x));
            else
                offer_incumbent(extract_coeffs(out.x));
            log(depth, bound, "integral");
            return std::nullopt;
        }

        rounding_heuristic(out.x);
        if (bound <= lower_bound_ + kBoundTol) {
            log(depth, bound, "pruned-bound");
            return std::nullopt;  // case (ii)
        }

        Node node;
        node.fixes = std::move(fixes);
        node.bound = bound;
        node.depth = depth;
        node.id = nodes_;
        node.branch_var = branch_var;
        log(depth, bound, "branched");
        return node;
    }

    void log(int depth, double bound, const char* action) {
        if (!trace_) return;
        *trace_ << depth << ',' << bound << ','
                << (incumbent_found_ ? incumbent_score_ : -1.0) << ',' << action << '\n';
    }

    const MioProblem& prob_;
    const MioConfig& cfg_;
    std::ostream* trace_;
    std::size_t nb_;
    std::size_t n_;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> heap_;
    std::vector<Node> stack_;
    std::multiset<double> open_bounds_;

    score::Coefficients incumbent_;
    double incumbent_score_ = -lp::kInf;
    bool incumbent_found_ = false;
    double lower_bound_ = -lp::kInf;
    double final_bound_ = -lp::kInf;
    long nodes_ = 0;
};

}  // namespace

SolveResult branch_and_bound(const MioProblem& prob, const MioConfig& cfg,
                             std::ostream* trace,
                             std::optional<double> initial_lower_bound) {
    Bnb solver(prob, cfg, trace);
    return solver.run(initial_lower_bound);
}

SolveResult solve_prescience(const data::Dataset& d, const score::ParamBox& box,
                             const MioConfig& cfg, std::ostream* trace,
                             const score::ParamBox* box_minus) {
    auto build = [&](int alpha, const score::ParamBox& b) {
        return cfg.formulation == Formulation::A ? build_formulation_a(d, alpha, b, cfg)
                                                 : build_formulation_b(d, alpha, b, cfg);
    };
    const auto plus = branch_and_bound(build(1, box), cfg, trace);
    std::optional<double> warm;
    if (plus.has_incumbent) warm = plus.score;
    const auto minus = branch_and_bound(
        build(-1, box_minus ? *box_minus : box), cfg, trace, warm);

    const bool minus_wins = minus.has_incumbent &&
                            (!plus.has_incumbent || minus.score > plus.score + 1e-15);
    SolveResult res = minus_wins ? minus : plus;
    res.nodes_explored = plus.nodes_explored + minus.nodes_explored;
    res.wall_seconds = plus.wall_seconds + minus.wall_seconds;
    res.best_bound = std::max({plus.best_bound, minus.best_bound, res.score});
    res.mio_gap = std::max(0.0, res.best_bound - res.score);
    if (!res.has_incumbent) {
        res.status = SolveStatus::Infeasible;
    } else if (res.mio_gap <= 1e-9) {
        res.status = SolveStatus::Optimal;
    } else if (plus.status == SolveStatus::NodeLimit || minus.status == SolveStatus::NodeLimit) {
        res.status = SolveStatus::NodeLimit;
    } else if (plus.status == SolveStatus::TimeLimit || minus.status == SolveStatus::TimeLimit) {
        res.status = SolveStatus::TimeLimit;
    } else {
        res.status = SolveStatus::GapReached;
    }
    return res;
}

}  // namespace prescience::mio
