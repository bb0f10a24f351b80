#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fuzzyclust/common.hpp"

namespace fuzzyclust {

/// Euclidean projection onto the unit simplex, in place.
///
/// Sort-and-threshold algorithm: sort descending, find the largest k with
/// x_(k) - (S_k - 1)/k >= 0, subtract the threshold (S_k - 1)/k and clamp
/// at zero. O(C log C). The output sums to 1 up to the last bit, so the
/// column-stochastic invariant does not drift across iterations.
inline void project_simplex_inplace(std::span<double> x) {
    const std::size_t c = x.size();
    if (c == 0) throw InvalidInput("project_simplex: empty vector");
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidInput("project_simplex: non-finite entry");
    }
    if (c == 1) {
        x[0] = 1.0;
        return;
    }

    thread_local std::vector<double> sorted;
    sorted.assign(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    double cumsum = 0.0;
    double threshold = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        cumsum += sorted[k];
        const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - t >= 0.0) threshold = t;
    }

    for (double& v : x) v = std::max(v - threshold, 0.0);

    // Fold the float residual of the sum into the largest entries (split
    // evenly across ties so equal inputs stay equal). A couple of rounds
    // reach an exactly representable unit sum in practice.
    for (int round = 0; round < 4; ++round) {
        double sum = 0.0;
        for (double v : x) sum += v;
        const double residual = sum - 1.0;
        if (residual == 0.0) break;
        const double top = *std::max_element(x.begin(), x.end());
        std::size_t ties = 0;
        for (double v : x) ties += (v == top);
        const double share = residual / static_cast<double>(ties);
        for (double& v : x) {
            if (v == top) v = std::max(v - share, 0.0);
        }
    }
}

/// Copying variant of project_simplex_inplace.
inline std::vector<double> project_simplex(std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    project_simplex_inplace(y);
    return y;
}

}  // namespace fuzzyclust
