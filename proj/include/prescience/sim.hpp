#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prescience/data.hpp"
#include "prescience/mio.hpp"
#include "prescience/rng.hpp"
#include "prescience/score.hpp"

namespace prescience::sim {

enum class DgpVariant { I, II };

struct DgpSpec {
    DgpVariant variant = DgpVariant::I;
    std::size_t p = 10;
    std::size_t n_train = 100;
    std::size_t n_valid = 5000;
    std::size_t reps = 1;
    std::uint64_t seed = 0;
    double theta3_star = 0.0;      // 0 means the variant default (-0.35 / -1.5)
    double rho = 0.25;
    double sigma_multiplier = 1.0; // scales sigma(W); ~0 gives the noiseless limit
    double bound = 10.0;           // parameter space is [-bound, bound]^{1+p}

    double effective_theta3() const {
        if (theta3_star != 0.0) return theta3_star;
        return variant == DgpVariant::I ? -0.35 : -1.5;
    }
};

struct Sample {
    data::Dataset train;
    data::Dataset valid;
    score::Coefficients theta_star;
};

Sample sample_dataset(const DgpSpec& spec, Rng& rng);

// One prediction method: a fixed-q PRESCIENCE when q_candidates has a single
// entry, PRE_CV otherwise.
struct MethodSpec {
    std::string name;
    std::vector<int> q_candidates;
    bool is_cv() const { return q_candidates.size() > 1; }
};

struct RepOutcome {
    score::Coefficients coefficients;
    double wall_seconds = 0.0;
    bool solved = false;           // false when a limit was hit with no incumbent
};

struct MethodMetrics {
    std::string method;
    double corr_sel = 0.0;
    double orac_sel = 0.0;
    double num_irrel = 0.0;
    double in_score = 0.0;
    double in_rs = 0.0;
    double out_score = 0.0;
    double out_rs = 0.0;
    std::size_t reps_used = 0;
    std::vector<double> times;
};

MethodMetrics compute_metrics(const std::string& method,
                              const std::vector<RepOutcome>& outcomes,
                              const std::vector<Sample>& samples);

struct ExperimentResult {
    std::vector<MethodMetrics> rows;
};

ExperimentResult run_experiment(const DgpSpec& spec,
                                const std::vector<MethodSpec>& methods,
                                const mio::MioConfig& mio_cfg,
                                bool warm_start = false, int cv_folds = 5);

// metrics table: rows = methods, columns = the selection and score statistics
void write_metrics_csv(const ExperimentResult& r, const std::string& path);
// timing table: mean/min/median/max wall seconds per method
void write_timing_csv(const ExperimentResult& r, const std::string& path);

}  // namespace prescience::sim
