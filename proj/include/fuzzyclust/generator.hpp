#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fuzzyclust/common.hpp"
#include "fuzzyclust/graph.hpp"
#include "fuzzyclust/rng.hpp"

namespace fuzzyclust {

/// Two-cluster Erdős–Rényi construction: independent G(n1, p1) and
/// G(n2, p2) blocks bridged by exactly k_inter random inter-cluster edges.
struct GeneratorSpec {
    std::size_t n1 = 0;
    double p1 = 0.0;
    std::size_t n2 = 0;
    double p2 = 0.0;
    std::size_t k_inter = 0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n1 == 0 || n2 == 0) throw InvalidInput("generator: cluster sizes must be positive");
        if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0) {
            throw InvalidInput("generator: probabilities must lie in [0, 1]");
        }
        if (k_inter > n1 * n2) throw InvalidInput("generator: k_inter exceeds n1*n2");
    }
};

struct GeneratedGraph {
    Graph graph;
    /// Cluster label (1 or 2) per surviving node, aligned with graph ids.
    std::vector<int> labels;
};

/// Samples the two blocks by per-pair Bernoulli draws from splitmix64,
/// re-indexes the second cluster by +n1, adds k_inter distinct random
/// inter-cluster edges, prunes degree-<=1 nodes, and verifies the result is
/// a single connected component. Deterministic given the spec.
inline GeneratedGraph generate_two_cluster_er(const GeneratorSpec& spec) {
    spec.validate();
    SplitMix64 rng(spec.seed);

    Graph g;
    g.num_nodes = spec.n1 + spec.n2;
    auto sample_block = [&](std::size_t n, double p, std::uint32_t offset) {
        for (std::uint32_t i = 0; i + 1 < n; ++i) {
            for (std::uint32_t j = i + 1; j < n; ++j) {
                if (rng.next_double() < p) g.edges.emplace_back(offset + i, offset + j);
            }
        }
    };
    sample_block(spec.n1, spec.p1, 0);
    sample_block(spec.n2, spec.p2, static_cast<std::uint32_t>(spec.n1));

    std::set<std::pair<std::uint32_t, std::uint32_t>> bridges;
    while (bridges.size() < spec.k_inter) {
        const auto u = static_cast<std::uint32_t>(rng.next_below(spec.n1));
        const auto v = static_cast<std::uint32_t>(spec.n1 + rng.next_below(spec.n2));
        bridges.emplace(u, v);
    }
    for (const auto& e : bridges) g.edges.push_back(e);
    normalize_edges(g.edges);

    // The peel mask tells which original nodes survive, so labels can be
    // carried over to the recompacted ids.
    const auto removed = degree_one_peel_mask(g);
    GeneratedGraph out;
    out.graph = prune_degree_one(g);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        if (!removed[v]) out.labels.push_back(v < spec.n1 ? 1 : 2);
    }

    bool cluster1 = false;
    bool cluster2 = false;
    for (int l : out.labels) (l == 1 ? cluster1 : cluster2) = true;
    if (!cluster1 || !cluster2) {
        throw InvalidInput(
            "generator: a cluster was pruned away entirely; raise the edge "
            "probability or pick another seed");
    }
    if (!is_connected(out.graph)) {
        throw InvalidInput(
            "generator: graph is disconnected after pruning; increase k_inter "
            "or pick another seed");
    }
    if (out.labels.size() != out.graph.num_nodes) {
        throw InvalidInput("generator: label/graph size mismatch");
    }
    return out;
}

/// CSV "node_id,label" per line, with header.
inline void write_labels_csv(const std::vector<int>& labels, std::ostream& out) {
    out << "node_id,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

inline std::vector<int> read_labels_csv(std::istream& in) {
    std::vector<int> labels;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("labels CSV: missing comma");
        labels.push_back(std::stoi(line.substr(comma + 1)));
    }
    return labels;
}

}  // namespace fuzzyclust
