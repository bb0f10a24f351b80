#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately brute force: enumeration, dense algebra, and plain
// loops that cross-check the library's structured implementations.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>
#include <sstream>
#include <vector>

#include "fuzzyclust/fuzzyclust.hpp"

namespace fctest {

using fuzzyclust::DenseMatrix;
using fuzzyclust::Graph;
using fuzzyclust::MembershipMatrix;
using fuzzyclust::SparseSimilarity;

// --- 7-node instance (two loose clusters bridged by node 4, 1-based ids) ---

inline std::string seven_node_edge_list() {
    return "1 2\n2 3\n2 4\n3 4\n4 5\n4 6\n5 6\n6 7\n";
}

inline Graph seven_node_graph() {
    std::istringstream in(seven_node_edge_list());
    return fuzzyclust::parse_edge_list(in).graph;
}

inline SparseSimilarity seven_node_similarity() {
    return SparseSimilarity::build_similarity(seven_node_graph());
}

inline MembershipMatrix make_membership(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t c = rows.size();
    const std::size_t n = rows.begin()->size();
    MembershipMatrix x(c, n);
    std::size_t k = 0;
    for (const auto& row : rows) {
        std::size_t i = 0;
        for (double v : row) x(k, i++) = v;
        ++k;
    }
    return x;
}

inline DenseMatrix make_dense(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t c = rows.size();
    const std::size_t n = rows.begin()->size();
    DenseMatrix x(c, n);
    std::size_t k = 0;
    for (const auto& row : rows) {
        std::size_t i = 0;
        for (double v : row) x(k, i++) = v;
        ++k;
    }
    return x;
}

/// Golden reference membership for the 7-node fixture, random start (a
/// near-critical snapshot; the exact critical point differs in the third
/// decimal).
inline MembershipMatrix golden_x1() {
    return make_membership({{0.8835, 1.0, 0.9096, 0.5202, 0.1163, 0.0, 0.0906},
                            {0.1165, 0.0, 0.0904, 0.4798, 0.8837, 1.0, 0.9094}});
}

/// Golden reference membership for the 7-node fixture, row-one start.
inline MembershipMatrix golden_x2() {
    return make_membership({{0.1308, 0.6435, 0.8692, 1.0, 0.8692, 0.6435, 0.1308},
                            {0.8692, 0.3565, 0.1308, 0.0, 0.1308, 0.3565, 0.8692}});
}

/// The uniform membership matrix (a saddle of the 7-node instance).
inline MembershipMatrix uniform_x3(std::size_t c = 2, std::size_t n = 7) {
    MembershipMatrix x(c, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < c; ++k) x(k, i) = 1.0 / static_cast<double>(c);
    }
    return x;
}

// --- random instances -------------------------------------------------------

/// Erdos-Renyi-ish random graph on n nodes with expected degree avg_deg,
/// reduced to its largest connected component.
inline Graph random_connected_graph(std::size_t n, double avg_deg, std::uint64_t seed) {
    fuzzyclust::SplitMix64 rng(seed);
    const double p = avg_deg / static_cast<double>(n - 1);
    Graph g;
    g.num_nodes = n;
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (rng.next_double() < p) g.edges.emplace_back(i, j);
        }
    }
    fuzzyclust::normalize_edges(g.edges);
    return fuzzyclust::largest_connected_component(g);
}

inline MembershipMatrix random_membership(std::size_t c, std::size_t n, std::uint64_t seed) {
    return fuzzyclust::init_membership(
        n, c, {fuzzyclust::InitKind::kRandom, seed, 0, nullptr});
}

/// Arbitrary dense direction with entries in [-1, 1].
inline DenseMatrix random_direction(std::size_t c, std::size_t n, std::uint64_t seed) {
    fuzzyclust::SplitMix64 rng(seed);
    DenseMatrix v(c, n);
    for (double& e : v.data()) e = 2.0 * rng.next_double() - 1.0;
    return v;
}

// --- independent oracles -----------------------------------------------------

/// Exact simplex projection by active-set enumeration: for every nonempty
/// support, solve the equality-constrained least squares in closed form,
/// keep feasible candidates, return the nearest. Exponential in C; fine for
/// C <= 10.
inline std::vector<double> simplex_projection_oracle(const std::vector<double>& x) {
    const std::size_t c = x.size();
    std::vector<double> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 1; mask < (1u << c); ++mask) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < c; ++k) {
            if (mask & (1u << k)) {
                sum += x[k];
                ++count;
            }
        }
        const double shift = (sum - 1.0) / static_cast<double>(count);
        std::vector<double> y(c, 0.0);
        bool feasible = true;
        for (std::size_t k = 0; k < c; ++k) {
            if (mask & (1u << k)) {
                y[k] = x[k] - shift;
                if (y[k] < 0.0) feasible = false;
            }
        }
        if (!feasible) continue;
        double dist = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            const double d = y[k] - x[k];
            dist += d * d;
        }
        if (dist < best_dist) {
            best_dist = dist;
            best = std::move(y);
        }
    }
    return best;
}

/// Spectral norm of S by power iteration on the dense copy.
inline double spectral_norm_oracle(const SparseSimilarity& s, std::size_t iters = 2000) {
    const auto dense = fuzzyclust::dense_similarity(s);
    const std::size_t n = s.size();
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(n);
    double lambda = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += dense[i * n + j] * v[j];
            w[i] = acc;
        }
        double norm = 0.0;
        for (double e : w) norm += e * e;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
        lambda = norm;
    }
    return lambda;
}

/// Connected components by brute-force label propagation.
inline std::vector<std::vector<std::uint32_t>> components_oracle(const Graph& g) {
    std::vector<std::uint32_t> label(g.num_nodes);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) label[v] = v;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [u, v] : g.edges) {
            const std::uint32_t m = std::min(label[u], label[v]);
            if (label[u] != m || label[v] != m) {
                label[u] = label[v] = m;
                changed = true;
            }
        }
    }
    std::vector<std::vector<std::uint32_t>> comps;
    std::vector<std::int64_t> slot(g.num_nodes, -1);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        if (slot[label[v]] < 0) {
            slot[label[v]] = static_cast<std::int64_t>(comps.size());
            comps.emplace_back();
        }
        comps[static_cast<std::size_t>(slot[label[v]])].push_back(v);
    }
    return comps;
}

/// f evaluated densely from scratch (no shared terms), for derivative checks.
inline double loss_at(const DenseMatrix& x, const std::vector<double>& s_dense) {
    return fuzzyclust::loss_dense_reference(x, s_dense);
}

/// Max-abs entrywise distance up to swapping the two rows (C = 2).
inline double dist_up_to_row_swap(const MembershipMatrix& a, const MembershipMatrix& b) {
    double direct = 0.0;
    double swapped = 0.0;
    for (std::size_t i = 0; i < a.nodes(); ++i) {
        for (std::size_t k = 0; k < a.clusters(); ++k) {
            direct = std::max(direct, std::abs(a(k, i) - b(k, i)));
            swapped = std::max(swapped,
                               std::abs(a(a.clusters() - 1 - k, i) - b(k, i)));
        }
    }
    return std::min(direct, swapped);
}

}  // namespace fctest
