#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fuzzyclust/common.hpp"
#include "fuzzyclust/dense.hpp"
#include "fuzzyclust/membership.hpp"
#include "fuzzyclust/objective.hpp"
#include "fuzzyclust/rng.hpp"
#include "fuzzyclust/solver.hpp"
#include "fuzzyclust/sparse.hpp"

namespace fuzzyclust {

/// A direction in R^{C x N} probed against the tangent cones at a point of
/// the feasible set. Membership in a cone is a predicate, not an invariant.
using TangentDirection = DenseMatrix;

struct SecondOrderConfig {
    double tau_probe = 1e-2;    ///< step for the projection fixed-point residual
    double eps_critical = 1e-2; ///< residual threshold for "critical"
    double eps_active = 1e-8;   ///< entries <= this count as active (zero)
    double eps_grad_orth = 1e-6;///< |<g, V>| / ||V||_F bound for the critical cone
    double eps_quad = 1e-8;     ///< violation threshold for conditions (a)/(b)
    double eps_cone = 1e-9;     ///< tolerance for cone membership checks
    std::size_t random_directions = 0;  ///< extra sampled combinations of kept pairs
    std::uint64_t seed = 0;
    std::size_t budget = std::numeric_limits<std::size_t>::max();
    unsigned workers = 1;
};

/// Full gradient -4 (X S - (X X^T) X), assembled column-wise.
inline DenseMatrix full_gradient(const DenseMatrix& x, const SparseSimilarity& s,
                                 unsigned workers = 1) {
    const ShareMatrix share = share_matrix(x, workers);
    const ColumnPass pass = fused_column_pass(x, s, workers);
    const std::size_t c = x.rows();
    DenseMatrix g(c, x.cols());
    parallel_for_blocks(x.cols(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::span<const double> xs_i{pass.xs.data() + i * c, c};
            gradient_column_fused(share, xs_i, x.col(i), g.col(i));
        }
    });
    return g;
}

/// || P_Omega(X - tau grad f(X)) - X ||_F, the fixed-point residual of the
/// projected gradient map.
inline double projection_residual(const MembershipMatrix& x, const SparseSimilarity& s,
                                  double tau_probe, unsigned workers = 1) {
    const ShareMatrix share = share_matrix(x, workers);
    const MembershipMatrix stepped = gpa_step(x, s, share, tau_probe, workers);
    double acc = 0.0;
    const auto a = stepped.data();
    const auto b = x.data();
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

/// First-order criticality via the projection fixed point: X is critical iff
/// it is a fixed point of the projected gradient map for any tau > 0.
inline bool is_critical(const MembershipMatrix& x, const SparseSimilarity& s, double tau_probe,
                        double eps, unsigned workers = 1) {
    if (!(tau_probe > 0.0)) throw InvalidInput("is_critical: tau_probe must be positive");
    return projection_residual(x, s, tau_probe, workers) <= eps;
}

/// V lies in T(xbar; Omega): column sums vanish and v_ki >= 0 wherever
/// x_ki is active (zero).
inline bool tangent_cone_contains(const MembershipMatrix& xbar, const TangentDirection& v,
                                  double eps, double eps_active = 1e-8) {
    if (v.rows() != xbar.clusters() || v.cols() != xbar.nodes()) return false;
    for (std::size_t i = 0; i < v.cols(); ++i) {
        double sum = 0.0;
        const auto vi = v.col(i);
        const auto xi = xbar.col(i);
        for (std::size_t k = 0; k < v.rows(); ++k) {
            sum += vi[k];
            if (xi[k] <= eps_active && vi[k] < -eps) return false;
        }
        if (std::abs(sum) > eps) return false;
    }
    return true;
}

/// W lies in T^2(xbar, vbar; Omega): column sums vanish and w_ki >= 0
/// wherever both x_ki and v_ki are (near) zero. At interior points this
/// reduces to the first-order cone.
inline bool second_order_cone_contains(const MembershipMatrix& xbar, const TangentDirection& vbar,
                                       const TangentDirection& w, double eps,
                                       double eps_active = 1e-8) {
    if (w.rows() != xbar.clusters() || w.cols() != xbar.nodes()) return false;
    for (std::size_t i = 0; i < w.cols(); ++i) {
        double sum = 0.0;
        const auto wi = w.col(i);
        const auto vi = vbar.col(i);
        const auto xi = xbar.col(i);
        for (std::size_t k = 0; k < w.rows(); ++k) {
            sum += wi[k];
            if (xi[k] <= eps_active && std::abs(vi[k]) <= eps_active && wi[k] < -eps) return false;
        }
        if (std::abs(sum) > eps) return false;
    }
    return true;
}

inline bool is_interior(const MembershipMatrix& xbar, double eps_active) {
    for (double v : xbar.data()) {
        if (v <= eps_active) return false;
    }
    return true;
}

namespace detail {

/// Single-column direction e_k - e_l placed at column i.
struct PairDirection {
    std::size_t column;
    std::size_t plus_row;
    std::size_t minus_row;
};

inline TangentDirection materialize(const PairDirection& p, std::size_t c, std::size_t n) {
    TangentDirection v(c, n);
    v(p.plus_row, p.column) = 1.0;
    v(p.minus_row, p.column) = -1.0;
    return v;
}

/// Kept pairwise candidates: sign-feasible for the tangent cone and
/// orthogonal to the gradient within eps_grad_orth (per unit norm).
inline std::vector<PairDirection> feasible_pairs(const MembershipMatrix& xbar,
                                                 const DenseMatrix& grad,
                                                 const SecondOrderConfig& cfg) {
    const std::size_t c = xbar.clusters();
    std::vector<PairDirection> kept;
    const double norm = std::sqrt(2.0);
    for (std::size_t i = 0; i < xbar.nodes(); ++i) {
        const auto xi = xbar.col(i);
        const auto gi = grad.col(i);
        for (std::size_t k = 0; k < c; ++k) {
            for (std::size_t l = 0; l < c; ++l) {
                if (k == l) continue;
                if (xi[l] <= cfg.eps_active) continue;  // -1 entry at an active zero
                if (std::abs(gi[k] - gi[l]) / norm > cfg.eps_grad_orth) continue;
                kept.push_back({i, k, l});
            }
        }
    }
    return kept;
}

}  // namespace detail

/// Structured candidate directions in the critical cone
/// {V in T(xbar) : <grad, V> = 0}: every sign-feasible, gradient-orthogonal
/// pairwise direction e_k - e_l per column, plus (optionally) random
/// nonnegative combinations of the kept pairs, rescaled to ||V||_F = sqrt(2)
/// and deduplicated. Sampling can refute optimality but never certify it.
inline std::vector<TangentDirection> critical_cone_directions(const MembershipMatrix& xbar,
                                                              const DenseMatrix& grad,
                                                              const SecondOrderConfig& cfg) {
    const std::size_t c = xbar.clusters();
    const std::size_t n = xbar.nodes();
    const auto pairs = detail::feasible_pairs(xbar, grad, cfg);

    std::vector<TangentDirection> out;
    out.reserve(pairs.size() + cfg.random_directions);
    for (const auto& p : pairs) out.push_back(detail::materialize(p, c, n));

    if (!pairs.empty() && cfg.random_directions > 0) {
        SplitMix64 rng(cfg.seed);
        const double target_norm = std::sqrt(2.0);
        std::size_t produced = 0;
        std::size_t attempts = 0;
        while (produced < cfg.random_directions && attempts < 20 * cfg.random_directions) {
            ++attempts;
            TangentDirection v(c, n);
            const std::size_t picks = 2 + rng.next_below(std::min<std::size_t>(pairs.size(), 6));
            for (std::size_t t = 0; t < picks; ++t) {
                const auto& p = pairs[rng.next_below(pairs.size())];
                const double coeff = rng.next_double();
                v(p.plus_row, p.column) += coeff;
                v(p.minus_row, p.column) -= coeff;
            }
            const double norm = frob_norm(v);
            if (norm == 0.0) continue;
            for (double& e : v.data()) e *= target_norm / norm;
            // Combinations of kept pairs stay in the tangent cone but their
            // gradient inner product can drift; discard violators.
            double g_dot = frob_inner(grad, v);
            if (std::abs(g_dot) / target_norm > cfg.eps_grad_orth) continue;
            if (!tangent_cone_contains(xbar, v, cfg.eps_cone, cfg.eps_active)) continue;
            bool duplicate = false;
            for (const auto& existing : out) {
                if (existing == v) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;
            out.push_back(std::move(v));
            ++produced;
        }
    }
    return out;
}

enum class RefinementStatus {
    kRefutedFirstOrder,
    kRefutedConditionA,
    kRefutedConditionB,
    kSurviving,
};

inline const char* to_string(RefinementStatus s) {
    switch (s) {
        case RefinementStatus::kRefutedFirstOrder: return "refuted_first_order";
        case RefinementStatus::kRefutedConditionA: return "refuted_condition_a";
        case RefinementStatus::kRefutedConditionB: return "refuted_condition_b";
        case RefinementStatus::kSurviving: return "surviving";
    }
    return "unknown";
}

/// Outcome of a sampled second-order check. "Surviving" means no sampled
/// direction refuted the condition; it is not a certificate of optimality.
struct RefinementVerdict {
    RefinementStatus status = RefinementStatus::kSurviving;
    std::optional<TangentDirection> witness;       ///< V for (a), W for (b)
    std::optional<TangentDirection> witness_base;  ///< the V that admitted W, for (b)
    double witness_value = 0.0;  ///< <H V, V>_F for (a); <grad, W>_F for (b)
    std::size_t directions_tested = 0;
    bool used_interior_shortcut = false;
};

/// Condition (a): <H(xbar) V, V>_F >= 0 over the sampled critical-cone
/// directions. Returns the most negative witness when refuted (ties keep the
/// lowest direction index).
inline RefinementVerdict check_condition_a(const MembershipMatrix& xbar,
                                           const SparseSimilarity& s,
                                           const std::vector<TangentDirection>& directions,
                                           const SecondOrderConfig& cfg) {
    RefinementVerdict verdict;
    double worst = 0.0;
    const TangentDirection* worst_dir = nullptr;
    for (const auto& v : directions) {
        if (verdict.directions_tested >= cfg.budget) break;
        ++verdict.directions_tested;
        const double q = quadratic_form(xbar, v, s, cfg.workers);
        if (q < worst) {
            worst = q;
            worst_dir = &v;
        }
    }
    if (worst < -cfg.eps_quad) {
        verdict.status = RefinementStatus::kRefutedConditionA;
        verdict.witness = *worst_dir;
        verdict.witness_value = worst;
    }
    return verdict;
}

/// Condition (b): <grad f(xbar), W>_F >= 0 over W sampled from the
/// second-order tangent cone, for each supplied cone direction V. Interior
/// points return immediately: there T^2 equals the first-order tangent cone
/// and criticality already implies the condition.
///
/// Only candidates that exercise the second-order sign pattern are
/// enumerated: W = e_k - e_l whose -1 entry sits at an active coordinate
/// that vbar escapes (|vbar| > 0 there). Every other pairwise W already lies
/// in the first-order tangent cone, where criticality makes <grad, W> >= 0
/// up to the accuracy of the input point, so those directions carry no
/// refinement information.
inline RefinementVerdict check_condition_b(const MembershipMatrix& xbar,
                                           const SparseSimilarity& s,
                                           const std::vector<TangentDirection>& directions,
                                           const SecondOrderConfig& cfg) {
    RefinementVerdict verdict;
    if (is_interior(xbar, cfg.eps_active)) {
        verdict.used_interior_shortcut = true;
        return verdict;
    }

    const DenseMatrix grad = full_gradient(xbar, s, cfg.workers);
    const std::size_t c = xbar.clusters();
    const std::size_t n = xbar.nodes();

    double worst = 0.0;
    std::optional<detail::PairDirection> worst_w;
    const TangentDirection* worst_v = nullptr;

    for (const auto& v : directions) {
        if (verdict.directions_tested >= cfg.budget) break;
        ++verdict.directions_tested;
        for (std::size_t i = 0; i < n; ++i) {
            const auto xi = xbar.col(i);
            const auto vi = v.col(i);
            const auto gi = grad.col(i);
            for (std::size_t l = 0; l < c; ++l) {
                if (!(xi[l] <= cfg.eps_active && std::abs(vi[l]) > cfg.eps_active)) continue;
                for (std::size_t k = 0; k < c; ++k) {
                    if (k == l) continue;
                    const double val = gi[k] - gi[l];
                    if (val < worst) {
                        worst = val;
                        worst_w = detail::PairDirection{i, k, l};
                        worst_v = &v;
                    }
                }
            }
        }
    }

    if (worst < -cfg.eps_quad) {
        verdict.status = RefinementStatus::kRefutedConditionB;
        verdict.witness = detail::materialize(*worst_w, c, n);
        verdict.witness_base = *worst_v;
        verdict.witness_value = worst;
    }
    return verdict;
}

/// Full refinement report for a candidate point.
struct RefinementReport {
    bool critical = false;
    double residual = 0.0;
    RefinementStatus status = RefinementStatus::kSurviving;
    RefinementVerdict condition_a;
    RefinementVerdict condition_b;
    std::size_t directions_generated = 0;
};

/// Runs the first-order test, then conditions (a) and (b) over the generated
/// critical-cone directions.
inline RefinementReport refine(const MembershipMatrix& xbar, const SparseSimilarity& s,
                               const SecondOrderConfig& cfg) {
    xbar.validate(1e-6);
    RefinementReport report;
    report.residual = projection_residual(xbar, s, cfg.tau_probe, cfg.workers);
    report.critical = report.residual <= cfg.eps_critical;
    if (!report.critical) {
        report.status = RefinementStatus::kRefutedFirstOrder;
        return report;
    }

    const DenseMatrix grad = full_gradient(xbar, s, cfg.workers);
    const auto directions = critical_cone_directions(xbar, grad, cfg);
    report.directions_generated = directions.size();

    report.condition_a = check_condition_a(xbar, s, directions, cfg);
    if (report.condition_a.status == RefinementStatus::kRefutedConditionA) {
        report.status = RefinementStatus::kRefutedConditionA;
        return report;
    }
    report.condition_b = check_condition_b(xbar, s, directions, cfg);
    report.status = report.condition_b.status;
    return report;
}

}  // namespace fuzzyclust
