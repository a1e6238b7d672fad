#include "prescience/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "prescience/lp.hpp"

namespace prescience::oracle {

namespace {

// all size-s index subsets of {0..n-1} in lexicographic order
struct Combinations {
    std::size_t n, s;
    std::vector<std::size_t> idx;
    bool first = true;

    Combinations(std::size_t n, std::size_t s) : n(n), s(s) {
        idx.resize(s);
        for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    }

    bool next() {
        if (first) {
            first = false;
            return s <= n;
        }
        if (s == 0) return false;
        std::size_t i = s;
        while (i-- > 0) {
            if (idx[i] + (s - i) < n) {
                ++idx[i];
                for (std::size_t j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
                return true;
            }
        }
        return false;
    }
};

struct Branch {
    int alpha;
    std::vector<std::size_t> subset;  // auxiliary indices allowed nonzero
};

// LP feasibility of a prediction pattern: find (beta, gamma_subset) in the box
// with index >= 0 where d_i=1 and index <= -delta where d_i=0. A slack margin
// t >= 0 is maximized on the predict-1 rows (index >= t) so the witness sits
// strictly inside its pattern whenever possible and survives floating-point
// re-evaluation of the index; t = 0 keeps feasibility identical to the raw
// constraint system.
struct PatternChecker {
    const data::Dataset& d;
    const score::ParamBox& box;
    double delta;

    std::optional<std::vector<double>> feasible(int alpha,
                                                const std::vector<std::size_t>& subset,
                                                const std::vector<int>& pattern) const {
        const std::size_t k = d.k();
        const std::size_t nv = k + subset.size();
        lp::LinearProgram lp;
        for (std::size_t j = 0; j < k; ++j)
            lp.add_variable(box.beta_bounds[j].first, box.beta_bounds[j].second);
        for (std::size_t s = 0; s < subset.size(); ++s)
            lp.add_variable(box.gamma_bounds[subset[s]].first,
                            box.gamma_bounds[subset[s]].second);
        const std::size_t tvar = lp.add_variable(0.0, 1.0, 1.0);
        lp.rows = Matrix(d.n(), nv + 1);
        for (std::size_t i = 0; i < d.n(); ++i) {
            for (std::size_t j = 0; j < k; ++j) lp.rows(i, j) = d.x_tilde(i, j);
            for (std::size_t s = 0; s < subset.size(); ++s)
                lp.rows(i, k + s) = d.z(i, subset[s]);
            const double a = alpha * d.x0[i];
            if (pattern[i] == 1) {
                lp.rows(i, tvar) = -1.0;  // index - t >= -a, i.e. index >= t
                lp.senses.push_back(lp::Sense::GreaterEqual);
                lp.rhs.push_back(-a);
            } else {
                lp.senses.push_back(lp::Sense::LessEqual);
                lp.rhs.push_back(-delta - a);
            }
        }
        auto out = lp::solve_lp(lp);
        if (out.status != lp::LpStatus::Optimal) return std::nullopt;
        out.x.pop_back();  // drop the margin variable
        return out.x;
    }
};

}  // namespace

OracleResult exact_max_score(const data::Dataset& d, const score::ParamBox& box,
                             int q, double delta) {
    const std::size_t n = d.n(), k = d.k(), p = d.p();
    if (n > 14 || p > 5)
        throw ArgumentError("oracle: instance exceeds guard rails (n <= 14, p <= 5)");
    if (q < 0 || static_cast<std::size_t>(q) > p)
        throw ArgumentError("oracle: q must lie in [0, p]");
    if (box.beta_bounds.size() != k || box.gamma_bounds.size() != p)
        throw ArgumentError("oracle: box dimension mismatch");

    std::vector<Branch> branches;
    for (int alpha : {1, -1}) {
        for (std::size_t size = 0; size <= static_cast<std::size_t>(q); ++size) {
            Combinations combos(p, size);
            while (combos.next())
                branches.push_back({alpha, std::vector<std::size_t>(
                                               combos.idx.begin(), combos.idx.end())});
        }
    }

    PatternChecker checker{d, box, delta};
    OracleResult res;
    res.best_score = -1.0;

    for (const auto& br : branches) {
        // patterns in decreasing score order: flip s observations from y
        for (std::size_t s = 0; s <= n; ++s) {
            // computed as (n-s)/n, the same expression empirical_score uses,
            // so scores compare bit-exactly
            const double sc = static_cast<double>(n - s) / static_cast<double>(n);
            if (sc <= res.best_score) break;  // the rest of this branch is worse
            bool branch_done = false;
            Combinations flips(n, s);
            while (flips.next()) {
                std::vector<int> pattern(d.y);
                for (std::size_t t = 0; t < s; ++t)
                    pattern[flips.idx[t]] = 1 - pattern[flips.idx[t]];
                ++res.patterns_checked;
                const auto x = checker.feasible(br.alpha, br.subset, pattern);
                if (!x) continue;
                if (sc > res.best_score) {
                    res.best_score = sc;
                    res.found = true;
                    res.witness.alpha = br.alpha;
                    res.witness.beta.assign(x->begin(), x->begin() + k);
                    res.witness.gamma.assign(p, 0.0);
                    for (std::size_t t = 0; t < br.subset.size(); ++t)
                        res.witness.gamma[br.subset[t]] = (*x)[k + t];
                }
                branch_done = true;
                break;  // first feasible pattern is this branch's maximum
            }
            if (branch_done) break;
        }
    }
    return res;
}

}  // namespace prescience::oracle
