#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fuzzyclust/common.hpp"
#include "fuzzyclust/dense.hpp"
#include "fuzzyclust/rng.hpp"
#include "fuzzyclust/simplex.hpp"

namespace fuzzyclust {

/// Dense C x N membership matrix. Column i is article i's membership
/// distribution over the C clusters and lies on the unit simplex.
class MembershipMatrix : public DenseMatrix {
public:
    MembershipMatrix() = default;
    MembershipMatrix(std::size_t num_clusters, std::size_t num_nodes)
        : DenseMatrix(num_clusters, num_nodes) {}

    std::size_t clusters() const { return rows(); }
    std::size_t nodes() const { return cols(); }

    bool operator==(const MembershipMatrix&) const = default;

    /// Largest deviation from the column-stochastic invariant: max over
    /// columns of |sum - 1| and of entry overshoot outside [0, 1].
    double feasibility_error() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < nodes(); ++i) {
            double sum = 0.0;
            for (double v : col(i)) {
                sum += v;
                if (v < 0.0) worst = std::max(worst, -v);
                if (v > 1.0) worst = std::max(worst, v - 1.0);
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        return worst;
    }

    void validate(double tol) const {
        if (clusters() == 0 || nodes() == 0) throw InvalidInput("membership: empty matrix");
        for (double v : data()) {
            if (!std::isfinite(v)) throw InvalidInput("membership: non-finite entry");
        }
        const double err = feasibility_error();
        if (err > tol) {
            std::ostringstream msg;
            msg << "membership: columns violate the simplex constraint by " << err
                << " (tolerance " << tol << ")";
            throw InvalidInput(msg.str());
        }
    }
};

enum class InitKind {
    kRandom,     ///< i.i.d. uniform(0,1) entries, each column projected
    kDirichlet,  ///< flat Dirichlet per column (exponential draws, normalized)
    kRowOne,     ///< row k ones, the rest zeros
    kUniform,    ///< every entry 1/C
    kGiven,      ///< validated copy of a caller-supplied matrix
};

struct InitStrategy {
    InitKind kind = InitKind::kRandom;
    std::uint64_t seed = 0;
    std::size_t row = 0;  ///< for kRowOne
    const MembershipMatrix* given = nullptr;
};

inline MembershipMatrix init_membership(std::size_t num_nodes, std::size_t num_clusters,
                                        const InitStrategy& strategy) {
    if (num_clusters == 0 || num_nodes == 0) {
        throw InvalidInput("init_membership: dimensions must be positive");
    }
    MembershipMatrix x(num_clusters, num_nodes);
    switch (strategy.kind) {
        case InitKind::kRandom: {
            SplitMix64 rng(strategy.seed);
            for (std::size_t i = 0; i < num_nodes; ++i) {
                auto column = x.col(i);
                for (double& v : column) v = rng.next_double();
                project_simplex_inplace(column);
            }
            break;
        }
        case InitKind::kDirichlet: {
            SplitMix64 rng(strategy.seed);
            for (std::size_t i = 0; i < num_nodes; ++i) {
                auto column = x.col(i);
                double sum = 0.0;
                for (double& v : column) {
                    v = -std::log(1.0 - rng.next_double());
                    sum += v;
                }
                for (double& v : column) v /= sum;
                project_simplex_inplace(column);
            }
            break;
        }
        case InitKind::kRowOne: {
            if (strategy.row >= num_clusters) throw InvalidInput("init_membership: row out of range");
            for (std::size_t i = 0; i < num_nodes; ++i) x(strategy.row, i) = 1.0;
            break;
        }
        case InitKind::kUniform: {
            const double v = 1.0 / static_cast<double>(num_clusters);
            for (std::size_t i = 0; i < num_nodes; ++i) {
                for (double& e : x.col(i)) e = v;
            }
            break;
        }
        case InitKind::kGiven: {
            if (strategy.given == nullptr) throw InvalidInput("init_membership: no matrix supplied");
            if (strategy.given->clusters() != num_clusters || strategy.given->nodes() != num_nodes) {
                throw InvalidInput("init_membership: supplied matrix has wrong shape");
            }
            strategy.given->validate(1e-9);
            x = *strategy.given;
            break;
        }
    }
    return x;
}

/// CSV dump, one row per node: node_id,x_1,...,x_C. Values are printed with
/// %.17g so a reload reproduces the doubles bit-exactly.
inline void write_membership_csv(const MembershipMatrix& x, std::ostream& out) {
    out << "node_id";
    for (std::size_t k = 1; k <= x.clusters(); ++k) out << ",x_" << k;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < x.nodes(); ++i) {
        out << i;
        for (double v : x.col(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

inline MembershipMatrix read_membership_csv(std::istream& in) {
    std::vector<std::vector<double>> columns;
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> vals;
        std::stringstream ls(line);
        std::string cell;
        bool first = true;
        while (std::getline(ls, cell, ',')) {
            if (first) {
                first = false;  // node_id column
                continue;
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                vals.push_back(v);
            } catch (const std::exception&) {
                throw InvalidInput("membership CSV: bad value at line " + std::to_string(line_no));
            }
        }
        if (vals.empty()) throw InvalidInput("membership CSV: no values at line " + std::to_string(line_no));
        if (!columns.empty() && vals.size() != columns.front().size()) {
            throw InvalidInput("membership CSV: ragged row at line " + std::to_string(line_no));
        }
        columns.push_back(std::move(vals));
    }
    if (columns.empty()) throw InvalidInput("membership CSV: no data rows");

    MembershipMatrix x(columns.front().size(), columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t k = 0; k < columns[i].size(); ++k) x(k, i) = columns[i][k];
    }
    return x;
}

}  // namespace fuzzyclust
