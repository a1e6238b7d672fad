#include "prescience/selection.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>

namespace prescience::selection {

namespace {

double epsilon_for(const FitSpec& spec, std::size_t n, std::size_t p) {
    switch (spec.epsilon_mode) {
        case EpsilonMode::Exact: return 0.0;
        case EpsilonMode::Rule: return epsilon_rule(n, p);
        case EpsilonMode::Fixed: return spec.epsilon_fixed;
    }
    return 0.0;
}

bool has_constant_covariate(const data::Dataset& d, std::string* which) {
    auto constant = [&](auto getter, std::size_t n) {
        const double v0 = getter(0);
        for (std::size_t i = 1; i < n; ++i)
            if (getter(i) != v0) return false;
        return true;
    };
    const std::size_t n = d.n();
    if (constant([&](std::size_t i) { return d.x0[i]; }, n)) {
        *which = d.x0_name;
        return true;
    }
    for (std::size_t j = 0; j < d.k(); ++j) {
        if (static_cast<int>(j) == d.intercept_col) continue;
        if (constant([&](std::size_t i) { return d.x_tilde(i, j); }, n)) {
            *which = d.x_tilde_names[j];
            return true;
        }
    }
    for (std::size_t j = 0; j < d.p(); ++j) {
        if (constant([&](std::size_t i) { return d.z(i, j); }, n)) {
            *which = d.z_names[j];
            return true;
        }
    }
    return false;
}

struct WarmBoxes {
    score::ParamBox plus, minus;
    WarmStartDiag diag;
};

WarmBoxes prepare_boxes(const data::Dataset& d, const FitSpec& spec,
                        const score::ParamBox& box) {
    WarmBoxes wb{box, box, {}};
    if (!spec.warm_start) return wb;
    wb.diag.used = true;
    if (d.p() >= d.n()) {
        // sign constraints cannot tighten anything once p exceeds n
        std::cerr << "[warmstart] p >= n; warm start disabled, using cold box\n";
        wb.diag.fallback = true;
        return wb;
    }
    const auto logit = warmstart::fit_logit(d);
    for (int alpha : {1, -1}) {
        auto refined = warmstart::tighten_bounds(d, alpha, box,
                                                 logit.fitted_probabilities);
        wb.diag.lp_calls += refined.lp_calls;
        if (!refined.feasible) {
            std::cerr << "[warmstart] tightening infeasible for alpha=" << alpha
                      << "; falling back to cold start\n";
            wb.diag.fallback = true;
            wb.plus = wb.minus = box;
            return wb;
        }
        refined.tau = spec.tau;
        refined.box = warmstart::enlarge(refined, box, spec.tau);
        if (alpha == 1) {
            wb.diag.feasible_plus = true;
            wb.plus = refined.box;
            wb.diag.volume_ratio =
                std::exp(refined.box.log_volume() - box.log_volume());
        } else {
            wb.diag.feasible_minus = true;
            wb.minus = refined.box;
        }
    }
    return wb;
}

}  // namespace

double epsilon_rule(std::size_t n, std::size_t p) {
    if (n < 2) throw ArgumentError("epsilon_rule: n must be at least 2");
    const double pn = static_cast<double>(std::max(p, n));
    return std::min(0.05, 0.5 * std::sqrt(std::log(pn) / static_cast<double>(n)));
}

CvOutcome cross_validate_q(const data::Dataset& d, const FitSpec& spec,
                           const score::ParamBox& box) {
    if (spec.q_candidates.empty())
        throw ArgumentError("cross_validate_q: empty candidate set");
    for (int q : spec.q_candidates)
        if (q < 0 || static_cast<std::size_t>(q) > d.p())
            throw ArgumentError("cross_validate_q: q candidate outside [0, p]");

    auto candidates = spec.q_candidates;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const auto folds = data::split_folds(d.n(), spec.folds, spec.seed);
    CvOutcome out;
    for (int q : candidates) out.table.push_back({q, 0.0, 0});

    for (int f = 0; f < spec.folds; ++f) {
        std::vector<std::size_t> train_idx, valid_idx;
        for (std::size_t i = 0; i < d.n(); ++i)
            (folds.fold_index[i] == f ? valid_idx : train_idx).push_back(i);
        const auto train = data::subset_rows(d, train_idx);
        const auto valid = data::subset_rows(d, valid_idx);

        std::string degenerate;
        if (has_constant_covariate(train, &degenerate)) {
            std::cerr << "[cv] fold " << f << " skipped: training column '"
                      << degenerate << "' is constant\n";
            continue;
        }

        const auto boxes = prepare_boxes(train, spec, box);
        for (std::size_t r = 0; r < out.table.size(); ++r) {
            mio::MioConfig cfg = spec.mio;
            cfg.q = out.table[r].q;
            cfg.epsilon = epsilon_for(spec, train.n(), train.p());
            const auto res = mio::solve_prescience(train, boxes.plus, cfg, nullptr,
                                                   &boxes.minus);
            if (!res.has_incumbent) continue;
            out.table[r].mean_validation_score +=
                score::empirical_score(res.coefficients, valid);
            out.table[r].folds_used += 1;
        }
    }

    int best = -1;
    double best_score = -1.0;
    bool any = false;
    for (auto& row : out.table) {
        if (row.folds_used == 0) continue;
        any = true;
        row.mean_validation_score /= row.folds_used;
        if (row.mean_validation_score > best_score + 1e-12) {
            best_score = row.mean_validation_score;
            best = row.q;
        } else if (best < 0) {
            best = row.q;
        }
    }
    if (!any) throw ArgumentError("cross_validate_q: all folds skipped");
    out.q_star = best;
    return out;
}

FitReport fit(const data::Dataset& d, const FitSpec& spec, const score::ParamBox& box) {
    FitReport report;
    FitSpec eff = spec;
    if (d.p() == 0) eff.q_candidates = {0};
    if (eff.q_candidates.empty())
        throw ArgumentError("fit: empty q candidate set");

    if (eff.q_candidates.size() > 1) {
        const auto cv = cross_validate_q(d, eff, box);
        report.cv_table = cv.table;
        report.q = cv.q_star;
    } else {
        report.q = eff.q_candidates.front();
    }

    const auto boxes = prepare_boxes(d, eff, box);
    report.warmstart = boxes.diag;

    mio::MioConfig cfg = eff.mio;
    cfg.q = report.q;
    cfg.epsilon = epsilon_for(eff, d.n(), d.p());
    report.result = mio::solve_prescience(d, boxes.plus, cfg, nullptr, &boxes.minus);
    return report;
}

}  // namespace prescience::selection
