#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

#include "doctest.h"
#include "prescience/data.hpp"
#include "prescience/rng.hpp"

using namespace prescience;

namespace {

std::string temp_path(const std::string& stem) {
    return "/tmp/prescience_test_" + stem + ".csv";
}

data::Dataset random_dataset(Rng& rng, std::size_t n, std::size_t k, std::size_t p) {
    data::Dataset d;
    d.y.resize(n);
    d.x0.resize(n);
    d.x_tilde = Matrix(n, k);
    d.z = Matrix(n, p);
    for (std::size_t j = 0; j < k; ++j) d.x_tilde_names.push_back("f" + std::to_string(j));
    for (std::size_t j = 0; j < p; ++j) d.z_names.push_back("z" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        d.y[i] = static_cast<int>(rng.below(2));
        d.x0[i] = rng.normal();
        for (std::size_t j = 0; j < k; ++j) d.x_tilde(i, j) = rng.normal();
        for (std::size_t j = 0; j < p; ++j) d.z(i, j) = rng.normal();
    }
    d.validate();
    return d;
}

}  // namespace

TEST_CASE("load_csv: direct parse with schema roles") {
    const auto path = temp_path("load");
    {
        std::ofstream out(path);
        out << "y,dcost,cars\n1,0.5,2\n0,-1.25,0\n1,3,1\n";
    }
    data::Schema schema;
    schema.outcome = "y";
    schema.x0 = "dcost";
    schema.auxiliary = {"cars"};
    const auto d = data::load_csv(path, schema);
    CHECK(d.n() == 3);
    CHECK(d.k() == 0);
    CHECK(d.p() == 1);
    CHECK(d.y[0] == 1);
    CHECK(d.x0[1] == doctest::Approx(-1.25));
    CHECK(d.z(2, 0) == doctest::Approx(1.0));
    std::remove(path.c_str());
}

TEST_CASE("load_csv: outcome outside {0,1} is a parse error with location") {
    const auto path = temp_path("badoutcome");
    {
        std::ofstream out(path);
        out << "y,x\n1,0.5\n2,1.0\n";
    }
    data::Schema schema;
    schema.outcome = "y";
    schema.x0 = "x";
    try {
        data::load_csv(path, schema);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("load_csv: missing column is a schema error") {
    const auto path = temp_path("missing");
    {
        std::ofstream out(path);
        out << "y,x\n1,0.5\n";
    }
    data::Schema schema;
    schema.outcome = "y";
    schema.x0 = "nope";
    CHECK_THROWS_AS(data::load_csv(path, schema), SchemaError);
    std::remove(path.c_str());
}

TEST_CASE("save_csv / load_csv round trip") {
    Rng rng(11);
    const auto d = random_dataset(rng, 17, 2, 3);
    const auto path = temp_path("roundtrip");
    data::save_csv(d, path);

    data::Schema schema;
    schema.outcome = "y";
    schema.x0 = d.x0_name;
    schema.focus = d.x_tilde_names;
    schema.auxiliary = d.z_names;
    const auto back = data::load_csv(path, schema);
    REQUIRE(back.n() == d.n());
    for (std::size_t i = 0; i < d.n(); ++i) {
        CHECK(back.y[i] == d.y[i]);
        CHECK(back.x0[i] == d.x0[i]);
        for (std::size_t j = 0; j < d.k(); ++j) CHECK(back.x_tilde(i, j) == d.x_tilde(i, j));
        for (std::size_t j = 0; j < d.p(); ++j) CHECK(back.z(i, j) == d.z(i, j));
    }
    std::remove(path.c_str());
}

TEST_CASE("standardize: (1,2,3) maps to (-1,0,1)") {
    data::Dataset d;
    d.y = {0, 1, 0};
    d.x0 = {1.0, 2.0, 3.0};
    d.x_tilde = Matrix(3, 0);
    d.z = Matrix(3, 0);
    d.validate();
    const auto s = data::standardize(d);
    CHECK(s.x0[0] == doctest::Approx(-1.0));
    CHECK(s.x0[1] == doctest::Approx(0.0));
    CHECK(s.x0[2] == doctest::Approx(1.0));
}

TEST_CASE("standardize: constant column errors, intercept skipped") {
    data::Dataset d;
    d.y = {0, 1, 0};
    d.x0 = {1.0, 2.0, 4.0};
    d.x_tilde = Matrix(3, 1, 1.0);
    d.x_tilde_names = {"Intercept"};
    d.intercept_col = 0;
    d.z = Matrix(3, 1, 5.0);
    d.z_names = {"c"};
    d.validate();
    CHECK_THROWS_AS(data::standardize(d), DegenerateColumnError);
    // standardizing everything except the constant auxiliary is fine, and the
    // intercept column is left untouched
    const auto s = data::standardize(d, {d.x0_name});
    CHECK(s.x_tilde(0, 0) == 1.0);
    CHECK(s.z(0, 0) == 5.0);
}

TEST_CASE("standardize: moments and idempotence on random data") {
    Rng rng(5);
    const auto d = random_dataset(rng, 40, 1, 2);
    const auto s = data::standardize(d);
    auto check_moments = [&](const std::vector<double>& col) {
        const double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        CHECK(std::abs(mean) < 1e-12);
        CHECK(std::abs(ss / (col.size() - 1) - 1.0) < 1e-12);
    };
    check_moments(s.x0);
    const auto twice = data::standardize(s);
    for (std::size_t i = 0; i < s.n(); ++i) CHECK(std::abs(twice.x0[i] - s.x0[i]) < 1e-12);
}

TEST_CASE("quadratic_expand: m=2 row values and ordering") {
    data::Dataset d;
    d.y = {1};
    d.x0 = {0.0};
    d.x_tilde = Matrix(1, 0);
    d.z = Matrix(1, 2);
    d.z(0, 0) = 2.0;
    d.z(0, 1) = 3.0;
    d.z_names = {"a", "b"};
    d.validate();
    const auto e = data::quadratic_expand(d, {"a", "b"});
    REQUIRE(e.p() == 5);
    CHECK(e.z(0, 0) == 2.0);
    CHECK(e.z(0, 1) == 3.0);
    CHECK(e.z(0, 2) == 6.0);
    CHECK(e.z(0, 3) == 4.0);
    CHECK(e.z(0, 4) == 9.0);
    // y / x0 / x_tilde untouched
    CHECK(e.y == d.y);
    CHECK(e.x0 == d.x0);
}

TEST_CASE("quadratic_expand: m=3 column order is base, cross products, squares") {
    data::Dataset d;
    d.y = {1};
    d.x0 = {0.0};
    d.x_tilde = Matrix(1, 0);
    d.z = Matrix(1, 3, 1.0);
    d.z_names = {"CARS", "DOVTT", "DIVTT"};
    d.validate();
    const auto e = data::quadratic_expand(d, d.z_names);
    REQUIRE(e.p() == 9);
    const std::vector<std::string> want = {
        "CARS",        "DOVTT",       "DIVTT",
        "CARS*DOVTT",  "DOVTT*DIVTT", "CARS*DIVTT",
        "CARS*CARS",   "DOVTT*DOVTT", "DIVTT*DIVTT"};
    CHECK(e.z_names == want);
}

TEST_CASE("quadratic_expand: m=1 gives (v, v^2)") {
    data::Dataset d;
    d.y = {1, 0};
    d.x0 = {0.0, 1.0};
    d.x_tilde = Matrix(2, 0);
    d.z = Matrix(2, 1);
    d.z(0, 0) = -3.0;
    d.z(1, 0) = 0.5;
    d.z_names = {"v"};
    d.validate();
    const auto e = data::quadratic_expand(d, {"v"});
    REQUIRE(e.p() == 2);
    CHECK(e.z(0, 1) == 9.0);
    CHECK(e.z(1, 1) == 0.25);
}

TEST_CASE("split_folds: balance, determinism, coverage") {
    const auto f = data::split_folds(10, 5, 42);
    std::vector<int> counts(5, 0);
    for (int fi : f.fold_index) counts[fi]++;
    for (int c : counts) CHECK(c == 2);

    const auto g = data::split_folds(10, 5, 42);
    CHECK(f.fold_index == g.fold_index);

    const auto big = data::split_folds(842, 5, 7);
    std::vector<int> sizes(5, 0);
    for (int fi : big.fold_index) sizes[fi]++;
    std::multiset<int> got(sizes.begin(), sizes.end());
    CHECK(got == std::multiset<int>({169, 169, 168, 168, 168}));

    CHECK_THROWS_AS(data::split_folds(3, 5, 0), ArgumentError);
}

TEST_CASE("subset_rows preserves order and values") {
    Rng rng(8);
    const auto d = random_dataset(rng, 9, 1, 2);
    const auto s = data::subset_rows(d, {4, 0, 8});
    REQUIRE(s.n() == 3);
    CHECK(s.x0[0] == d.x0[4]);
    CHECK(s.x0[1] == d.x0[0]);
    CHECK(s.y[2] == d.y[8]);
    CHECK(s.z(1, 1) == d.z(0, 1));
}
