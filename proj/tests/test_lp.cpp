#include <cmath>
#include <vector>

#include "doctest.h"
#include "prescience/lp.hpp"
#include "prescience/rng.hpp"

using namespace prescience;
using lp::LinearProgram;
using lp::LpStatus;
using lp::Sense;

namespace {

// independent oracle: enumerate all basic solutions from nvars-subsets of the
// active hyperplanes (rows as equalities plus box faces), keep the feasible max
struct VertexOracle {
    bool feasible = false;
    double best = 0.0;
};

VertexOracle vertex_enumerate(const LinearProgram& prob) {
    const std::size_t n = prob.num_vars();
    const std::size_t m = prob.num_rows();
    struct Plane {
        std::vector<double> a;
        double b;
    };
    std::vector<Plane> planes;
    for (std::size_t r = 0; r < m; ++r) {
        Plane pl;
        pl.a.resize(n);
        for (std::size_t j = 0; j < n; ++j) pl.a[j] = prob.rows(r, j);
        pl.b = prob.rhs[r];
        planes.push_back(pl);
    }
    for (std::size_t j = 0; j < n; ++j) {
        Plane lo{std::vector<double>(n, 0.0), prob.lower[j]};
        lo.a[j] = 1.0;
        planes.push_back(lo);
        Plane hi{std::vector<double>(n, 0.0), prob.upper[j]};
        hi.a[j] = 1.0;
        planes.push_back(hi);
    }

    VertexOracle out;
    std::vector<std::size_t> pick(n);
    auto check_point = [&](const std::vector<double>& x) {
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] < prob.lower[j] - 1e-7 || x[j] > prob.upper[j] + 1e-7) return;
        for (std::size_t r = 0; r < m; ++r) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += prob.rows(r, j) * x[j];
            const double diff = lhs - prob.rhs[r];
            if (prob.senses[r] == Sense::LessEqual && diff > 1e-7) return;
            if (prob.senses[r] == Sense::GreaterEqual && diff < -1e-7) return;
            if (prob.senses[r] == Sense::Equal && std::abs(diff) > 1e-7) return;
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += prob.objective[j] * x[j];
        if (!out.feasible || obj > out.best) out.best = obj;
        out.feasible = true;
    };

    // iterate all n-subsets of planes
    const std::size_t np = planes.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (;;) {
        Matrix A(n, n);
        std::vector<double> b(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t j = 0; j < n; ++j) A(r, j) = planes[idx[r]].a[j];
            b[r] = planes[idx[r]].b;
        }
        if (auto x = lp::solve_linear_system(A, b)) check_point(*x);

        std::size_t i = n;
        bool advanced = false;
        while (i-- > 0) {
            if (idx[i] + (n - i) < np) {
                ++idx[i];
                for (std::size_t j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    return out;
}

LinearProgram random_lp(Rng& rng) {
    LinearProgram prob;
    const std::size_t n = 2 + rng.below(4);  // 2..5
    const std::size_t m = 1 + rng.below(6);  // 1..6
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = rng.uniform(-3.0, 0.0);
        const double hi = lo + rng.uniform(0.5, 4.0);
        prob.add_variable(lo, hi, rng.uniform(-2.0, 2.0));
    }
    prob.rows = Matrix(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j) prob.rows(r, j) = rng.uniform(-2.0, 2.0);
        const int s = static_cast<int>(rng.below(3));
        prob.senses.push_back(s == 0 ? Sense::LessEqual
                                     : (s == 1 ? Sense::GreaterEqual : Sense::Equal));
        prob.rhs.push_back(rng.uniform(-2.0, 2.0));
    }
    return prob;
}

}  // namespace

TEST_CASE("solve_lp: simple bounded maximum") {
    LinearProgram prob;
    prob.add_variable(0.0, 1.0, 1.0);
    prob.add_variable(0.0, 1.0, 1.0);
    prob.rows = Matrix(1, 2);
    prob.rows(0, 0) = 1.0;
    prob.rows(0, 1) = 1.0;
    prob.senses = {Sense::LessEqual};
    prob.rhs = {1.0};
    const auto out = lp::solve_lp(prob);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.objective_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_lp: infeasible pair of bounds") {
    LinearProgram prob;
    prob.add_variable(-lp::kInf, lp::kInf, 1.0);
    prob.rows = Matrix(2, 1);
    prob.rows(0, 0) = 1.0;
    prob.rows(1, 0) = 1.0;
    prob.senses = {Sense::GreaterEqual, Sense::LessEqual};
    prob.rhs = {2.0, 1.0};
    CHECK(lp::solve_lp(prob).status == LpStatus::Infeasible);
}

TEST_CASE("solve_lp: unbounded direction detected") {
    LinearProgram prob;
    prob.add_variable(0.0, lp::kInf, 1.0);
    prob.rows = Matrix(1, 1);
    prob.rows(0, 0) = -1.0;
    prob.senses = {Sense::LessEqual};
    prob.rhs = {0.0};
    CHECK(lp::solve_lp(prob).status == LpStatus::Unbounded);
}

TEST_CASE("solve_lp: equality constraints honored") {
    LinearProgram prob;
    prob.add_variable(-5.0, 5.0, 1.0);
    prob.add_variable(-5.0, 5.0, -1.0);
    prob.rows = Matrix(1, 2);
    prob.rows(0, 0) = 1.0;
    prob.rows(0, 1) = 1.0;
    prob.senses = {Sense::Equal};
    prob.rhs = {1.0};
    const auto out = lp::solve_lp(prob);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.objective_value == doctest::Approx(9.0));  // x=(5,-4)
}

TEST_CASE("solve_lp: matches vertex enumeration on random instances") {
    Rng rng(20240817);
    int solved = 0;
    for (int t = 0; t < 30; ++t) {
        const auto prob = random_lp(rng);
        const auto oracle = vertex_enumerate(prob);
        const auto out = lp::solve_lp(prob);
        if (!oracle.feasible) {
            CHECK(out.status == LpStatus::Infeasible);
            continue;
        }
        REQUIRE(out.status == LpStatus::Optimal);
        CHECK(out.objective_value == doctest::Approx(oracle.best).epsilon(1e-7));
        ++solved;

        // re-substituted feasibility within tolerance
        for (std::size_t r = 0; r < prob.num_rows(); ++r) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < prob.num_vars(); ++j)
                lhs += prob.rows(r, j) * out.x[j];
            const double diff = lhs - prob.rhs[r];
            if (prob.senses[r] == Sense::LessEqual) CHECK(diff <= 1e-9);
            if (prob.senses[r] == Sense::GreaterEqual) CHECK(diff >= -1e-9);
            if (prob.senses[r] == Sense::Equal) CHECK(std::abs(diff) <= 1e-9);
        }
    }
    CHECK(solved >= 10);  // the generator should not be mostly infeasible
}

TEST_CASE("solve_lp: deterministic output") {
    Rng rng(7);
    const auto prob = random_lp(rng);
    const auto a = lp::solve_lp(prob);
    const auto b = lp::solve_lp(prob);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::Optimal) {
        CHECK(a.iterations == b.iterations);
        for (std::size_t j = 0; j < a.x.size(); ++j) CHECK(a.x[j] == b.x[j]);
    }
}

TEST_CASE("solve_lp: Beale-style degenerate LP terminates") {
    LinearProgram prob;
    prob.add_variable(0.0, lp::kInf, 0.75);
    prob.add_variable(0.0, lp::kInf, -150.0);
    prob.add_variable(0.0, lp::kInf, 0.02);
    prob.add_variable(0.0, lp::kInf, -6.0);
    prob.rows = Matrix(3, 4);
    const double r0[] = {0.25, -60.0, -0.04, 9.0};
    const double r1[] = {0.5, -90.0, -0.02, 3.0};
    const double r2[] = {0.0, 0.0, 1.0, 0.0};
    for (int j = 0; j < 4; ++j) {
        prob.rows(0, j) = r0[j];
        prob.rows(1, j) = r1[j];
        prob.rows(2, j) = r2[j];
    }
    prob.senses = {Sense::LessEqual, Sense::LessEqual, Sense::LessEqual};
    prob.rhs = {0.0, 0.0, 1.0};
    const auto out = lp::solve_lp(prob);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.objective_value == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("box_linear_abs_max: corner cases and LP agreement") {
    CHECK(lp::box_linear_abs_max(1.0, {1.0, 2.0, -3.0},
                                 {{-10, 10}, {-10, 10}, {-10, 10}}) ==
          doctest::Approx(61.0));
    CHECK(lp::box_linear_abs_max(5.0, {}, {}) == doctest::Approx(5.0));

    Rng rng(99);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng.below(4);
        std::vector<double> c(n);
        std::vector<std::pair<double, double>> box(n);
        for (std::size_t j = 0; j < n; ++j) {
            c[j] = rng.uniform(-3.0, 3.0);
            const double lo = rng.uniform(-5.0, 1.0);
            box[j] = {lo, lo + rng.uniform(0.0, 6.0)};
        }
        const double c0 = rng.uniform(-3.0, 3.0);
        const double closed = lp::box_linear_abs_max(c0, c, box);

        // LP oracle: maximize +-(c0 + c.t) over the box
        double via_lp = -lp::kInf;
        for (double sgn : {1.0, -1.0}) {
            LinearProgram prob;
            for (std::size_t j = 0; j < n; ++j)
                prob.add_variable(box[j].first, box[j].second, sgn * c[j]);
            prob.rows = Matrix(0, n);
            const auto out = lp::solve_lp(prob);
            REQUIRE(out.status == LpStatus::Optimal);
            via_lp = std::max(via_lp, out.objective_value + sgn * c0);
        }
        CHECK(closed == doctest::Approx(via_lp).epsilon(1e-9));
    }
}

TEST_CASE("solve_linear_system") {
    Matrix I(3, 3);
    for (int i = 0; i < 3; ++i) I(i, i) = 1.0;
    auto x = lp::solve_linear_system(I, {1.0, 2.0, 3.0});
    REQUIRE(x.has_value());
    CHECK((*x)[1] == doctest::Approx(2.0));

    Matrix S(2, 2);
    S(0, 0) = 1.0;
    S(0, 1) = 1.0;
    S(1, 0) = 2.0;
    S(1, 1) = 2.0;
    CHECK(!lp::solve_linear_system(S, {1.0, 2.0}).has_value());

    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        const std::size_t d = 2 + rng.below(4);
        Matrix A(d, d);
        std::vector<double> b(d);
        for (std::size_t i = 0; i < d; ++i) {
            b[i] = rng.uniform(-2.0, 2.0);
            for (std::size_t j = 0; j < d; ++j) A(i, j) = rng.uniform(-2.0, 2.0);
            A(i, i) += 4.0;  // diagonally dominant, well conditioned
        }
        auto sol = lp::solve_linear_system(A, b);
        REQUIRE(sol.has_value());
        for (std::size_t i = 0; i < d; ++i) {
            double r = -b[i];
            for (std::size_t j = 0; j < d; ++j) r += A(i, j) * (*sol)[j];
            CHECK(std::abs(r) < 1e-8);
        }
    }
}

TEST_CASE("cholesky") {
    Matrix I(2, 2);
    I(0, 0) = I(1, 1) = 1.0;
    const auto L = lp::cholesky(I);
    CHECK(L(0, 0) == doctest::Approx(1.0));
    CHECK(L(1, 0) == doctest::Approx(0.0));

    Matrix S(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) S(i, j) = std::pow(0.25, std::abs(i - j));
    const auto C = lp::cholesky(S);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = 0.0;
            for (int t = 0; t < 3; ++t) v += C(i, t) * C(j, t);
            CHECK(std::abs(v - S(i, j)) < 1e-12);
        }

    Matrix N(2, 2);
    N(0, 0) = -1.0;
    N(1, 1) = -1.0;
    CHECK_THROWS_AS(lp::cholesky(N), DecompositionError);
}
