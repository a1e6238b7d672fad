#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prescience/core.hpp"

namespace prescience::data {

// Outcome plus covariates split into the scale-normalized focus covariate x0,
// the remaining focus block x_tilde (k columns, may contain an all-ones
// intercept column) and the auxiliary block z (p columns, subject to
// selection). Immutable after construction.
struct Dataset {
    std::vector<int> y;        // each in {0,1}
    std::vector<double> x0;
    Matrix x_tilde;            // n x k
    Matrix z;                  // n x p
    std::string x0_name = "x0";
    std::vector<std::string> x_tilde_names;
    std::vector<std::string> z_names;
    int intercept_col = -1;    // index into x_tilde of an all-ones column, or -1

    std::size_t n() const { return y.size(); }
    std::size_t k() const { return x_tilde.cols; }
    std::size_t p() const { return z.cols; }

    std::vector<std::string> column_names() const;
    void validate() const;  // throws ArgumentError on any invariant violation
};

struct Schema {
    std::string outcome;
    std::string x0;
    std::vector<std::string> focus;      // becomes x_tilde, in order
    std::vector<std::string> auxiliary;  // becomes z, in order
    bool add_intercept = false;          // prepend an all-ones column to x_tilde
};

struct FoldAssignment {
    std::vector<int> fold_index;  // length n, values in [0, K)
    int K = 0;
    std::uint64_t seed = 0;
};

Dataset load_csv(const std::string& path, const Schema& schema);
void save_csv(const Dataset& d, const std::string& path);

// Selected columns rescaled to sample mean 0, sample variance 1 (denominator
// n-1). Intercept column is never standardized. Empty selection means all
// covariate columns.
Dataset standardize(const Dataset& d, const std::vector<std::string>& columns = {});

// Replace the auxiliary block by the base columns, their pairwise cross
// products (lexicographic pair order) and their squares.
Dataset quadratic_expand(const Dataset& d, const std::vector<std::string>& base);

FoldAssignment split_folds(std::size_t n, int K, std::uint64_t seed);

// Rows of d at the given indices, in order.
Dataset subset_rows(const Dataset& d, const std::vector<std::size_t>& idx);

}  // namespace prescience::data
