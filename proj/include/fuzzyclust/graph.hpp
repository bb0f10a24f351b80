#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fuzzyclust/common.hpp"

namespace fuzzyclust {

/// Simple undirected graph with dense node ids 0..N-1.
/// Edges are stored as (u, v) with u < v, sorted, without duplicates or
/// self-loops.
struct Graph {
    std::size_t num_nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> deg(num_nodes, 0);
        for (const auto& [u, v] : edges) {
            ++deg[u];
            ++deg[v];
        }
        return deg;
    }

    std::vector<std::vector<std::uint32_t>> adjacency() const {
        std::vector<std::vector<std::uint32_t>> adj(num_nodes);
        for (const auto& [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        return adj;
    }
};

inline void normalize_edges(std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    for (auto& e : edges) {
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

struct ParsedGraph {
    Graph graph;
    /// original_ids[k] is the input id that was compacted to node k
    /// (first-appearance order).
    std::vector<std::int64_t> original_ids;
};

/// Parses whitespace-separated "u v" edge lines. Lines starting with '#'
/// (after leading blanks) and blank lines are skipped. Self-loops and
/// duplicate edges are dropped; directed inputs are symmetrized. Node ids
/// are compacted to 0..N-1 in order of first appearance.
inline ParsedGraph parse_edge_list(std::istream& in) {
    ParsedGraph out;
    std::unordered_map<std::int64_t, std::uint32_t> remap;
    auto intern = [&](std::int64_t id) -> std::uint32_t {
        auto [it, inserted] = remap.try_emplace(
            id, static_cast<std::uint32_t>(out.original_ids.size()));
        if (inserted) out.original_ids.push_back(id);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    bool saw_edge_line = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream ls(line);
        std::int64_t a = 0;
        std::int64_t b = 0;
        std::string extra;
        if (!(ls >> a >> b)) {
            throw IoError("edge list parse error at line " + std::to_string(line_no) +
                          ": expected two integer tokens, got \"" + line + "\"");
        }
        if (ls >> extra) {
            throw IoError("edge list parse error at line " + std::to_string(line_no) +
                          ": trailing token \"" + extra + "\"");
        }
        saw_edge_line = true;
        const std::uint32_t u = intern(a);
        const std::uint32_t v = intern(b);
        if (u != v) out.graph.edges.emplace_back(u, v);
    }
    if (!saw_edge_line) throw IoError("edge list is empty");

    out.graph.num_nodes = out.original_ids.size();
    normalize_edges(out.graph.edges);
    return out;
}

/// Induced subgraph on the given (sorted, deduplicated) node set, with ids
/// recompacted preserving relative order.
inline Graph induced_subgraph(const Graph& g, const std::vector<std::uint32_t>& nodes) {
    std::vector<std::uint32_t> new_id(g.num_nodes, UINT32_MAX);
    for (std::size_t k = 0; k < nodes.size(); ++k) new_id[nodes[k]] = static_cast<std::uint32_t>(k);

    Graph out;
    out.num_nodes = nodes.size();
    for (const auto& [u, v] : g.edges) {
        if (new_id[u] != UINT32_MAX && new_id[v] != UINT32_MAX) {
            out.edges.emplace_back(new_id[u], new_id[v]);
        }
    }
    normalize_edges(out.edges);
    return out;
}

inline std::vector<std::uint32_t> component_labels(const Graph& g, std::size_t& num_components) {
    const auto adj = g.adjacency();
    std::vector<std::uint32_t> comp(g.num_nodes, UINT32_MAX);
    num_components = 0;
    for (std::uint32_t s = 0; s < g.num_nodes; ++s) {
        if (comp[s] != UINT32_MAX) continue;
        const auto label = static_cast<std::uint32_t>(num_components++);
        std::queue<std::uint32_t> bfs;
        bfs.push(s);
        comp[s] = label;
        while (!bfs.empty()) {
            const std::uint32_t u = bfs.front();
            bfs.pop();
            for (std::uint32_t w : adj[u]) {
                if (comp[w] == UINT32_MAX) {
                    comp[w] = label;
                    bfs.push(w);
                }
            }
        }
    }
    return comp;
}

inline bool is_connected(const Graph& g) {
    if (g.num_nodes == 0) return false;
    std::size_t n = 0;
    component_labels(g, n);
    return n == 1;
}

/// Nodes of the largest connected component, ascending. Ties between
/// equal-sized components go to the one containing the smallest node id
/// (BFS from id 0 upward discovers it first).
inline std::vector<std::uint32_t> largest_connected_component_nodes(const Graph& g) {
    if (g.num_nodes == 0) throw InvalidInput("largest_connected_component: empty graph");
    std::size_t num_components = 0;
    const auto comp = component_labels(g, num_components);

    std::vector<std::size_t> sizes(num_components, 0);
    for (std::uint32_t c : comp) ++sizes[c];
    // Components are labeled in order of their smallest node id, so the
    // first maximal size wins the tie-break.
    std::size_t best = 0;
    for (std::size_t c = 1; c < num_components; ++c) {
        if (sizes[c] > sizes[best]) best = c;
    }

    std::vector<std::uint32_t> keep;
    keep.reserve(sizes[best]);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        if (comp[v] == best) keep.push_back(v);
    }
    return keep;
}

/// Largest connected component as an induced subgraph with recompacted ids.
inline Graph largest_connected_component(const Graph& g) {
    return induced_subgraph(g, largest_connected_component_nodes(g));
}

/// Marks every node peeled away by repeated degree-<=1 removal. What is left
/// unmarked is the 2-core, which is unique regardless of peel order.
inline std::vector<bool> degree_one_peel_mask(const Graph& g) {
    auto deg = g.degrees();
    const auto adj = g.adjacency();
    std::vector<bool> removed(g.num_nodes, false);
    std::vector<std::uint32_t> pending;
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        if (deg[v] <= 1) {
            removed[v] = true;
            pending.push_back(v);
        }
    }
    while (!pending.empty()) {
        const std::uint32_t v = pending.back();
        pending.pop_back();
        for (std::uint32_t w : adj[v]) {
            if (!removed[w] && deg[w]-- == 2) {
                removed[w] = true;
                pending.push_back(w);
            }
        }
    }
    return removed;
}

/// Nodes surviving iterated degree-<=1 removal, ascending.
inline std::vector<std::uint32_t> two_core_nodes(const Graph& g) {
    const auto removed = degree_one_peel_mask(g);
    std::vector<std::uint32_t> keep;
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        if (!removed[v]) keep.push_back(v);
    }
    return keep;
}

/// Iteratively removes every node of degree <= 1 (the 2-core). May return an
/// empty graph; trees collapse to nothing.
inline Graph prune_degree_one(const Graph& g) {
    return induced_subgraph(g, two_core_nodes(g));
}

/// Writes "u v" lines sorted lexicographically by (u, v).
inline void write_edge_list(const Graph& g, std::ostream& out) {
    for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
}

}  // namespace fuzzyclust
