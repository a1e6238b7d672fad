#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "prescience/rng.hpp"
#include "prescience/sim.hpp"

using namespace prescience;

TEST_CASE("rng: determinism and stream independence") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng s0 = Rng::for_stream(5, 0);
    Rng s1 = Rng::for_stream(5, 1);
    CHECK(s0.next_u64() != s1.next_u64());
}

TEST_CASE("rng: uniform range and mean") {
    Rng rng(7);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("rng: normal sampler passes a KS sanity band") {
    Rng rng(2024);
    const int n = 10000;
    std::vector<double> draws(n);
    for (auto& v : draws) v = rng.normal();
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 0.5 * std::erfc(-draws[i] / std::sqrt(2.0));
        ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("sample_dataset: covariance structure of the draws") {
    sim::DgpSpec spec;
    spec.variant = sim::DgpVariant::I;
    spec.p = 2;
    spec.n_train = 100000;
    spec.n_valid = 1;
    // Sigma_{1,3} = 0.25^2 = 0.0625 relates x0=V1 and z2=V3
    Rng rng(31);
    const auto s = sim::sample_dataset(spec, rng);
    const auto& d = s.train;
    auto mean = [&](auto get) {
        double m = 0.0;
        for (std::size_t i = 0; i < d.n(); ++i) m += get(i);
        return m / d.n();
    };
    const double m0 = mean([&](std::size_t i) { return d.x0[i]; });
    const double m2 = mean([&](std::size_t i) { return d.z(i, 1); });
    double cov = 0.0, var0 = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        cov += (d.x0[i] - m0) * (d.z(i, 1) - m2);
        var0 += (d.x0[i] - m0) * (d.x0[i] - m0);
    }
    cov /= d.n();
    var0 /= d.n();
    CHECK(std::abs(cov - 0.0625) < 0.01);
    CHECK(std::abs(var0 - 1.0) < 0.01);
}

TEST_CASE("sample_dataset: noiseless limit makes y deterministic") {
    sim::DgpSpec spec;
    spec.variant = sim::DgpVariant::I;
    spec.p = 3;
    spec.n_train = 200;
    spec.n_valid = 1;
    spec.sigma_multiplier = 1e-12;
    Rng rng(77);
    const auto s = sim::sample_dataset(spec, rng);
    const auto& d = s.train;
    int mismatches = 0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        const double idx = d.x0[i] + spec.effective_theta3() * d.z(i, 0);
        // sigma ~ 1e-12 can only flip an observation within 1e-10 of the margin
        if (std::abs(idx) > 1e-9 && d.y[i] != (idx >= 0.0 ? 1 : 0)) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("sample_dataset: theta_star layout and variant defaults") {
    sim::DgpSpec spec;
    spec.variant = sim::DgpVariant::II;
    spec.p = 4;
    spec.n_train = 10;
    spec.n_valid = 10;
    Rng rng(5);
    const auto s = sim::sample_dataset(spec, rng);
    CHECK(s.theta_star.alpha == 1);
    CHECK(s.theta_star.beta == std::vector<double>({0.0}));
    REQUIRE(s.theta_star.gamma.size() == 4);
    CHECK(s.theta_star.gamma[0] == -1.5);
    CHECK(s.theta_star.gamma[1] == 0.0);
    CHECK(s.train.intercept_col == 0);
}

TEST_CASE("compute_metrics: hand cases") {
    sim::DgpSpec spec;
    spec.variant = sim::DgpVariant::I;
    spec.p = 4;
    spec.n_train = 30;
    spec.n_valid = 50;
    Rng rng(13);
    std::vector<sim::Sample> samples;
    samples.push_back(sim::sample_dataset(spec, rng));

    sim::RepOutcome good;
    good.solved = true;
    good.coefficients.alpha = 1;
    good.coefficients.beta = {0.0};
    good.coefficients.gamma = {0.5, 0.0, 0.0, 0.0};
    auto m = sim::compute_metrics("m", {good}, samples);
    CHECK(m.corr_sel == 1.0);
    CHECK(m.orac_sel == 1.0);
    CHECK(m.num_irrel == 0.0);

    sim::RepOutcome extra = good;
    extra.coefficients.gamma = {0.5, 1e-9, 0.2, 0.0};
    m = sim::compute_metrics("m", {extra}, samples);
    CHECK(m.corr_sel == 1.0);
    CHECK(m.orac_sel == 0.0);
    CHECK(m.num_irrel == 1.0);

    // theta* itself has relative scores exactly 1
    sim::RepOutcome star;
    star.solved = true;
    star.coefficients = samples[0].theta_star;
    m = sim::compute_metrics("m", {star}, samples);
    CHECK(m.in_rs == 1.0);
    CHECK(m.out_rs == 1.0);
}

TEST_CASE("run_experiment: smoke run emits one row per method, reproducibly") {
    sim::DgpSpec spec;
    spec.variant = sim::DgpVariant::I;
    spec.p = 2;
    spec.n_train = 14;
    spec.n_valid = 50;
    spec.reps = 2;
    spec.seed = 99;
    mio::MioConfig cfg;
    const std::vector<sim::MethodSpec> methods = {{"PRESCIENCE(1)", {1}},
                                                  {"PRE_CV", {0, 1, 2}}};
    const auto a = sim::run_experiment(spec, methods, cfg, false, 2);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[0].method == "PRESCIENCE(1)");
    CHECK(a.rows[0].reps_used == 2);
    CHECK(a.rows[0].orac_sel <= a.rows[0].corr_sel);

    const auto b = sim::run_experiment(spec, methods, cfg, false, 2);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].corr_sel == b.rows[i].corr_sel);
        CHECK(a.rows[i].out_score == b.rows[i].out_score);
    }
}

TEST_CASE("write_metrics_csv: header and byte-identical reruns") {
    sim::DgpSpec spec;
    spec.variant = sim::DgpVariant::I;
    spec.p = 2;
    spec.n_train = 12;
    spec.n_valid = 30;
    spec.reps = 1;
    spec.seed = 4;
    mio::MioConfig cfg;
    const std::vector<sim::MethodSpec> methods = {{"PRESCIENCE(1)", {1}}};

    auto render = [&] {
        const auto r = sim::run_experiment(spec, methods, cfg, false, 2);
        const std::string path = "/tmp/prescience_test_metrics.csv";
        sim::write_metrics_csv(r, path);
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        std::remove(path.c_str());
        return ss.str();
    };
    const auto first = render();
    CHECK(first.rfind("method,corr_sel,orac_sel,num_irrel,in_score,in_rs,"
                      "out_score,out_rs,reps\n", 0) == 0);
    CHECK(render() == first);
}
