#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fuzzyclust/common.hpp"
#include "fuzzyclust/graph.hpp"

namespace fuzzyclust {

/// Symmetric sparse N x N similarity matrix in compressed-column form.
/// Row indices are strictly increasing within each column; values are
/// nonnegative. Symmetry makes the layout simultaneously CSC and CSR.
class SparseSimilarity {
public:
    SparseSimilarity() = default;

    /// From coordinate triplets (i, j, value). Requires an exactly symmetric
    /// pattern: every (i, j, v) with i != j must have a matching (j, i, v).
    /// Duplicated coordinates are an error.
    static SparseSimilarity from_triplets(
        std::size_t n, std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triplets) {
        for (const auto& [i, j, v] : triplets) {
            if (i >= n || j >= n) throw InvalidInput("similarity: index out of range");
            if (v < 0.0 || !std::isfinite(v)) throw InvalidInput("similarity: values must be finite and nonnegative");
        }
        std::sort(triplets.begin(), triplets.end(),
                  [](const auto& a, const auto& b) {
                      return std::tie(std::get<1>(a), std::get<0>(a)) <
                             std::tie(std::get<1>(b), std::get<0>(b));
                  });
        for (std::size_t k = 1; k < triplets.size(); ++k) {
            if (std::get<0>(triplets[k]) == std::get<0>(triplets[k - 1]) &&
                std::get<1>(triplets[k]) == std::get<1>(triplets[k - 1])) {
                throw InvalidInput("similarity: duplicate coordinate entry");
            }
        }

        SparseSimilarity s;
        s.n_ = n;
        s.col_ptr_.assign(n + 1, 0);
        s.rows_.reserve(triplets.size());
        s.values_.reserve(triplets.size());
        for (const auto& [i, j, v] : triplets) {
            ++s.col_ptr_[j + 1];
            s.rows_.push_back(i);
            s.values_.push_back(v);
        }
        for (std::size_t c = 0; c < n; ++c) s.col_ptr_[c + 1] += s.col_ptr_[c];

        s.validate_symmetry();
        s.frob_sq_ = 0.0;
        for (double v : s.values_) s.frob_sq_ += v * v;
        return s;
    }

    /// Adjacency-plus-identity construction: s_ij = 1 iff (i,j) is an edge
    /// or i = j. nnz = N + 2|E|.
    static SparseSimilarity build_similarity(const Graph& g) {
        std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t;
        t.reserve(g.num_nodes + 2 * g.edges.size());
        for (std::uint32_t i = 0; i < g.num_nodes; ++i) t.emplace_back(i, i, 1.0);
        for (const auto& [u, v] : g.edges) {
            t.emplace_back(u, v, 1.0);
            t.emplace_back(v, u, 1.0);
        }
        return from_triplets(g.num_nodes, std::move(t));
    }

    /// Reads "i j value" coordinate lines ('#' comments allowed). Entries
    /// must describe a symmetric matrix; asymmetric input is rejected rather
    /// than symmetrized.
    static SparseSimilarity load_coordinates(std::istream& in) {
        std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t;
        std::string line;
        std::size_t line_no = 0;
        std::uint32_t max_id = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ls(line);
            long long i = 0, j = 0;
            double v = 0.0;
            if (!(ls >> i >> j >> v) || i < 0 || j < 0) {
                throw IoError("similarity parse error at line " + std::to_string(line_no));
            }
            t.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), v);
            max_id = std::max({max_id, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
        if (t.empty()) throw IoError("similarity file is empty");
        return from_triplets(max_id + 1, std::move(t));
    }

    std::size_t size() const { return n_; }
    std::size_t nnz() const { return values_.size(); }
    double frob_sq() const { return frob_sq_; }
    double frob_norm() const { return std::sqrt(frob_sq_); }

    std::span<const std::uint32_t> col_rows(std::size_t j) const {
        return {rows_.data() + col_ptr_[j], rows_.data() + col_ptr_[j + 1]};
    }
    std::span<const double> col_values(std::size_t j) const {
        return {values_.data() + col_ptr_[j], values_.data() + col_ptr_[j + 1]};
    }

private:
    void validate_symmetry() const {
        // Column-sorted triplets make (j, i) lookups a binary search.
        for (std::size_t j = 0; j < n_; ++j) {
            const auto rows = col_rows(j);
            const auto vals = col_values(j);
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (k > 0 && rows[k] <= rows[k - 1]) {
                    throw InvalidInput("similarity: row indices must be strictly increasing");
                }
                const std::uint32_t i = rows[k];
                if (i == j) continue;
                const auto mirror_rows = col_rows(i);
                const auto it = std::lower_bound(mirror_rows.begin(), mirror_rows.end(),
                                                 static_cast<std::uint32_t>(j));
                if (it == mirror_rows.end() || *it != j) {
                    throw InvalidInput("similarity: matrix is not symmetric");
                }
                const double mirror = col_values(i)[static_cast<std::size_t>(it - mirror_rows.begin())];
                if (mirror != vals[k]) {
                    throw InvalidInput("similarity: asymmetric values at (" +
                                       std::to_string(i) + ", " + std::to_string(j) + ")");
                }
            }
        }
    }

    std::size_t n_ = 0;
    std::vector<std::size_t> col_ptr_;
    std::vector<std::uint32_t> rows_;
    std::vector<double> values_;
    double frob_sq_ = 0.0;
};

}  // namespace fuzzyclust
