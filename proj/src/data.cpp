#include "prescience/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "prescience/rng.hpp"

namespace prescience::data {

std::vector<std::string> Dataset::column_names() const {
    std::vector<std::string> names;
    names.push_back(x0_name);
    names.insert(names.end(), x_tilde_names.begin(), x_tilde_names.end());
    names.insert(names.end(), z_names.begin(), z_names.end());
    return names;
}

void Dataset::validate() const {
    const std::size_t nn = y.size();
    if (nn == 0) throw ArgumentError("dataset: n must be at least 1");
    for (int v : y)
        if (v != 0 && v != 1) throw ArgumentError("dataset: outcome outside {0,1}");
    if (x0.size() != nn) throw ArgumentError("dataset: x0 length differs from n");
    if (x_tilde.rows != nn || z.rows != nn)
        throw ArgumentError("dataset: covariate row count differs from n");
    if (x_tilde_names.size() != x_tilde.cols || z_names.size() != z.cols)
        throw ArgumentError("dataset: column name count mismatch");
    auto names = column_names();
    std::set<std::string> uniq(names.begin(), names.end());
    if (uniq.size() != names.size())
        throw ArgumentError("dataset: column names not unique");
    if (intercept_col >= 0) {
        if (static_cast<std::size_t>(intercept_col) >= x_tilde.cols)
            throw ArgumentError("dataset: intercept column index out of range");
        for (std::size_t i = 0; i < nn; ++i)
            if (x_tilde(i, static_cast<std::size_t>(intercept_col)) != 1.0)
                throw ArgumentError("dataset: intercept column is not all ones");
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
    }
    return out;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw ParseError("non-numeric value '" + cell + "' at row " +
                         std::to_string(row) + ", column " + col);
    }
    if (pos != cell.size())
        throw ParseError("non-numeric value '" + cell + "' at row " +
                         std::to_string(row) + ", column " + col);
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty file: " + path);
    const auto cols = split_line(header);

    auto col_of = [&](const std::string& name) {
        const auto it = std::find(cols.begin(), cols.end(), name);
        if (it == cols.end())
            throw SchemaError("column '" + name + "' not found in " + path);
        return static_cast<std::size_t>(it - cols.begin());
    };

    const std::size_t y_col = col_of(schema.outcome);
    const std::size_t x0_col = col_of(schema.x0);
    std::vector<std::size_t> focus_cols, aux_cols;
    for (const auto& f : schema.focus) focus_cols.push_back(col_of(f));
    for (const auto& a : schema.auxiliary) aux_cols.push_back(col_of(a));

    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (cells.size() != cols.size())
            throw ParseError("row " + std::to_string(lineno) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(cols.size()));
        rows.push_back(std::move(cells));
    }

    const std::size_t n = rows.size();
    if (n == 0) throw ParseError("no data rows in " + path);

    Dataset d;
    d.y.resize(n);
    d.x0.resize(n);
    d.x0_name = schema.x0;
    const std::size_t extra = schema.add_intercept ? 1 : 0;
    d.x_tilde = Matrix(n, focus_cols.size() + extra);
    d.z = Matrix(n, aux_cols.size());
    if (schema.add_intercept) {
        d.x_tilde_names.push_back("Intercept");
        d.intercept_col = 0;
    }
    d.x_tilde_names.insert(d.x_tilde_names.end(), schema.focus.begin(), schema.focus.end());
    d.z_names = schema.auxiliary;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows[i];
        const double yv = parse_number(r[y_col], i + 2, schema.outcome);
        if (yv != 0.0 && yv != 1.0)
            throw ParseError("outcome value '" + r[y_col] + "' not in {0,1} at row " +
                             std::to_string(i + 2));
        d.y[i] = static_cast<int>(yv);
        d.x0[i] = parse_number(r[x0_col], i + 2, schema.x0);
        if (schema.add_intercept) d.x_tilde(i, 0) = 1.0;
        for (std::size_t j = 0; j < focus_cols.size(); ++j)
            d.x_tilde(i, j + extra) = parse_number(r[focus_cols[j]], i + 2, schema.focus[j]);
        for (std::size_t j = 0; j < aux_cols.size(); ++j)
            d.z(i, j) = parse_number(r[aux_cols[j]], i + 2, schema.auxiliary[j]);
    }
    d.validate();
    return d;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write file: " + path);
    out.precision(17);
    out << "y," << d.x0_name;
    for (const auto& nm : d.x_tilde_names) out << ',' << nm;
    for (const auto& nm : d.z_names) out << ',' << nm;
    out << '\n';
    for (std::size_t i = 0; i < d.n(); ++i) {
        out << d.y[i] << ',' << d.x0[i];
        for (std::size_t j = 0; j < d.k(); ++j) out << ',' << d.x_tilde(i, j);
        for (std::size_t j = 0; j < d.p(); ++j) out << ',' << d.z(i, j);
        out << '\n';
    }
}

namespace {

void standardize_column(std::vector<double>& col, const std::string& name) {
    const std::size_t n = col.size();
    double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    if (n < 2 || ss == 0.0)
        throw DegenerateColumnError("column '" + name + "' has zero sample variance");
    const double sd = std::sqrt(ss / (n - 1));
    for (double& v : col) v = (v - mean) / sd;
}

}  // namespace

Dataset standardize(const Dataset& d, const std::vector<std::string>& columns) {
    const bool all = columns.empty();
    auto selected = [&](const std::string& name) {
        return all || std::find(columns.begin(), columns.end(), name) != columns.end();
    };
    for (const auto& c : columns) {
        auto names = d.column_names();
        if (std::find(names.begin(), names.end(), c) == names.end())
            throw SchemaError("standardize: unknown column '" + c + "'");
    }

    Dataset out = d;
    std::vector<double> col(d.n());
    if (selected(d.x0_name)) {
        col = d.x0;
        standardize_column(col, d.x0_name);
        out.x0 = col;
    }
    for (std::size_t j = 0; j < d.k(); ++j) {
        if (static_cast<int>(j) == d.intercept_col) continue;
        if (!selected(d.x_tilde_names[j])) continue;
        for (std::size_t i = 0; i < d.n(); ++i) col[i] = d.x_tilde(i, j);
        standardize_column(col, d.x_tilde_names[j]);
        for (std::size_t i = 0; i < d.n(); ++i) out.x_tilde(i, j) = col[i];
    }
    for (std::size_t j = 0; j < d.p(); ++j) {
        if (!selected(d.z_names[j])) continue;
        for (std::size_t i = 0; i < d.n(); ++i) col[i] = d.z(i, j);
        standardize_column(col, d.z_names[j]);
        for (std::size_t i = 0; i < d.n(); ++i) out.z(i, j) = col[i];
    }
    return out;
}

Dataset quadratic_expand(const Dataset& d, const std::vector<std::string>& base) {
    if (base.empty())
        throw ArgumentError("quadratic_expand: base must have at least one column");
    std::vector<std::size_t> base_idx;
    for (const auto& b : base) {
        const auto it = std::find(d.z_names.begin(), d.z_names.end(), b);
        if (it == d.z_names.end())
            throw SchemaError("quadratic_expand: '" + b + "' is not an auxiliary column");
        base_idx.push_back(static_cast<std::size_t>(it - d.z_names.begin()));
    }

    const std::size_t m = base_idx.size();
    const std::size_t n = d.n();
    const std::size_t p_new = m + m * (m + 1) / 2;

    Dataset out = d;
    out.z = Matrix(n, p_new);
    out.z_names.clear();

    // order: base columns, cross products by increasing index gap then
    // leading index (for m=3 this is (1,2),(2,3),(1,3)), squares
    std::size_t c = 0;
    for (std::size_t j = 0; j < m; ++j, ++c) {
        out.z_names.push_back(d.z_names[base_idx[j]]);
        for (std::size_t i = 0; i < n; ++i) out.z(i, c) = d.z(i, base_idx[j]);
    }
    for (std::size_t gap = 1; gap < m; ++gap) {
        for (std::size_t a = 0; a + gap < m; ++a, ++c) {
            const std::size_t b = a + gap;
            out.z_names.push_back(d.z_names[base_idx[a]] + "*" + d.z_names[base_idx[b]]);
            for (std::size_t i = 0; i < n; ++i)
                out.z(i, c) = d.z(i, base_idx[a]) * d.z(i, base_idx[b]);
        }
    }
    for (std::size_t j = 0; j < m; ++j, ++c) {
        out.z_names.push_back(d.z_names[base_idx[j]] + "*" + d.z_names[base_idx[j]]);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = d.z(i, base_idx[j]);
            out.z(i, c) = v * v;
        }
    }
    out.validate();
    return out;
}

FoldAssignment split_folds(std::size_t n, int K, std::uint64_t seed) {
    if (K < 2) throw ArgumentError("split_folds: K must be at least 2");
    if (n < static_cast<std::size_t>(K))
        throw ArgumentError("split_folds: n must be at least K");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t j = rng.below(i + 1);
        std::swap(perm[i], perm[j]);
    }
    FoldAssignment f;
    f.K = K;
    f.seed = seed;
    f.fold_index.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        f.fold_index[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(K));
    return f;
}

Dataset subset_rows(const Dataset& d, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.x0_name = d.x0_name;
    out.x_tilde_names = d.x_tilde_names;
    out.z_names = d.z_names;
    out.intercept_col = d.intercept_col;
    const std::size_t n = idx.size();
    out.y.resize(n);
    out.x0.resize(n);
    out.x_tilde = Matrix(n, d.k());
    out.z = Matrix(n, d.p());
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = idx[r];
        out.y[r] = d.y[i];
        out.x0[r] = d.x0[i];
        for (std::size_t j = 0; j < d.k(); ++j) out.x_tilde(r, j) = d.x_tilde(i, j);
        for (std::size_t j = 0; j < d.p(); ++j) out.z(r, j) = d.z(i, j);
    }
    out.validate();
    return out;
}

}  // namespace prescience::data
