#include "prescience/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "prescience/lp.hpp"
#include "prescience/selection.hpp"

namespace prescience::sim {

namespace {

data::Dataset draw_dataset(const DgpSpec& spec, std::size_t n, const Matrix& chol,
                           Rng& rng) {
    const std::size_t p = spec.p;
    const double theta3 = spec.effective_theta3();

    data::Dataset d;
    d.y.resize(n);
    d.x0.resize(n);
    d.x0_name = "V1";
    d.x_tilde = Matrix(n, 1, 1.0);
    d.x_tilde_names = {"Intercept"};
    d.intercept_col = 0;
    d.z = Matrix(n, p);
    for (std::size_t j = 0; j < p; ++j) d.z_names.push_back("V" + std::to_string(j + 2));

    std::vector<double> g(p + 1), v(p + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= p; ++j) g[j] = rng.normal();
        for (std::size_t j = 0; j <= p; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t <= j; ++t) s += chol(j, t) * g[t];
            v[j] = s;
        }
        const double xi = rng.normal();

        d.x0[i] = v[0];
        for (std::size_t j = 0; j < p; ++j) d.z(i, j) = v[j + 1];

        double sigma;
        if (spec.variant == DgpVariant::I) {
            sigma = 0.25;
        } else {
            const double s12 = v[0] + v[1];
            const double s2 = s12 * s12;
            sigma = 0.25 * (1.0 + 2.0 * s2 + s2 * s2);
        }
        sigma *= spec.sigma_multiplier;

        const double index = v[0] + theta3 * v[1];  // W'theta*: x0 + theta3*Z1
        d.y[i] = index >= sigma * xi ? 1 : 0;
    }
    return d;
}

}  // namespace

Sample sample_dataset(const DgpSpec& spec, Rng& rng) {
    if (spec.p < 1) throw ArgumentError("sample_dataset: p must be at least 1");
    const std::size_t dim = spec.p + 1;
    Matrix sigma(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            sigma(i, j) = std::pow(spec.rho, std::abs(static_cast<double>(i) -
                                                      static_cast<double>(j)));
    const Matrix chol = lp::cholesky(sigma);

    Sample s;
    s.train = draw_dataset(spec, spec.n_train, chol, rng);
    s.valid = draw_dataset(spec, spec.n_valid, chol, rng);
    s.theta_star.alpha = 1;
    s.theta_star.beta = {0.0};
    s.theta_star.gamma.assign(spec.p, 0.0);
    s.theta_star.gamma[0] = spec.effective_theta3();
    return s;
}

MethodMetrics compute_metrics(const std::string& method,
                              const std::vector<RepOutcome>& outcomes,
                              const std::vector<Sample>& samples) {
    if (outcomes.size() != samples.size())
        throw ArgumentError("compute_metrics: outcome/sample count mismatch");
    MethodMetrics m;
    m.method = method;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        m.times.push_back(outcomes[r].wall_seconds);
        if (!outcomes[r].solved) continue;
        const auto& c = outcomes[r].coefficients;
        const auto& s = samples[r];
        m.reps_used += 1;

        const bool z1 = std::abs(c.gamma[0]) > score::kSelectionTol;
        std::size_t irrel = 0;
        for (std::size_t j = 1; j < c.gamma.size(); ++j)
            if (std::abs(c.gamma[j]) > score::kSelectionTol) ++irrel;
        m.corr_sel += z1 ? 1.0 : 0.0;
        m.orac_sel += (z1 && irrel == 0) ? 1.0 : 0.0;
        m.num_irrel += static_cast<double>(irrel);

        const double in_hat = score::empirical_score(c, s.train);
        const double in_star = score::empirical_score(s.theta_star, s.train);
        const double out_hat = score::empirical_score(c, s.valid);
        const double out_star = score::empirical_score(s.theta_star, s.valid);
        m.in_score += in_hat;
        m.in_rs += in_hat / in_star;
        m.out_score += out_hat;
        m.out_rs += out_hat / out_star;
    }
    if (m.reps_used > 0) {
        const double k = static_cast<double>(m.reps_used);
        m.corr_sel /= k;
        m.orac_sel /= k;
        m.num_irrel /= k;
        m.in_score /= k;
        m.in_rs /= k;
        m.out_score /= k;
        m.out_rs /= k;
    }
    return m;
}

ExperimentResult run_experiment(const DgpSpec& spec,
                                const std::vector<MethodSpec>& methods,
                                const mio::MioConfig& mio_cfg,
                                bool warm_start, int cv_folds) {
    std::vector<Sample> samples;
    samples.reserve(spec.reps);
    for (std::size_t r = 0; r < spec.reps; ++r) {
        Rng rng = Rng::for_stream(spec.seed, r);
        samples.push_back(sample_dataset(spec, rng));
    }

    const auto box = score::ParamBox::cube(1, spec.p, spec.bound);
    const bool exact = spec.p < spec.n_train;

    ExperimentResult result;
    for (const auto& method : methods) {
        std::vector<RepOutcome> outcomes(spec.reps);
        for (std::size_t r = 0; r < spec.reps; ++r) {
            selection::FitSpec fs;
            fs.q_candidates = method.q_candidates;
            fs.folds = cv_folds;
            fs.epsilon_mode = exact ? selection::EpsilonMode::Exact
                                    : selection::EpsilonMode::Rule;
            fs.warm_start = warm_start;
            fs.seed = spec.seed + r;
            fs.mio = mio_cfg;
            const auto report = selection::fit(samples[r].train, fs, box);
            outcomes[r].wall_seconds = report.result.wall_seconds;
            outcomes[r].solved = report.result.has_incumbent;
            if (report.result.has_incumbent)
                outcomes[r].coefficients = report.result.coefficients;
        }
        result.rows.push_back(compute_metrics(method.name, outcomes, samples));
    }
    return result;
}

namespace {

struct TimingStats {
    double mean = 0.0, min = 0.0, median = 0.0, max = 0.0;
};

TimingStats timing_stats(std::vector<double> t) {
    TimingStats s;
    if (t.empty()) return s;
    std::sort(t.begin(), t.end());
    s.min = t.front();
    s.max = t.back();
    const std::size_t n = t.size();
    s.median = (n % 2 == 1) ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
    for (double v : t) s.mean += v;
    s.mean /= static_cast<double>(n);
    return s;
}

}  // namespace

void write_metrics_csv(const ExperimentResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write file: " + path);
    out.precision(12);
    out << "method,corr_sel,orac_sel,num_irrel,in_score,in_rs,out_score,out_rs,reps\n";
    for (const auto& m : r.rows) {
        out << m.method << ',' << m.corr_sel << ',' << m.orac_sel << ','
            << m.num_irrel << ',' << m.in_score << ',' << m.in_rs << ','
            << m.out_score << ',' << m.out_rs << ',' << m.reps_used << '\n';
    }
}

void write_timing_csv(const ExperimentResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write file: " + path);
    out.precision(6);
    out << "method,mean,min,median,max\n";
    for (const auto& m : r.rows) {
        const auto s = timing_stats(m.times);
        out << m.method << ',' << s.mean << ',' << s.min << ',' << s.median << ','
            << s.max << '\n';
    }
}

}  // namespace prescience::sim
