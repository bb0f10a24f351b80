#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "fuzzyclust/common.hpp"
#include "fuzzyclust/membership.hpp"
#include "fuzzyclust/objective.hpp"
#include "fuzzyclust/parallel.hpp"
#include "fuzzyclust/simplex.hpp"
#include "fuzzyclust/sparse.hpp"

namespace fuzzyclust {

enum class Method { kGpa, kFista };

enum class TerminationReason { kTolReached, kMaxIter, kLossIncreaseFista };

inline const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::kTolReached: return "tol_reached";
        case TerminationReason::kMaxIter: return "max_iter";
        case TerminationReason::kLossIncreaseFista: return "loss_increase_fista";
    }
    return "unknown";
}

struct SolverConfig {
    double step_size = 0.0;  ///< <= 0 selects the Frobenius-surrogate default
    std::size_t max_iter = 100000;
    double tol = 0.0;  ///< stop once the per-iteration loss decrease is <= tol
    Method method = Method::kGpa;
    std::size_t trace_every = 1;
    bool fista_restart = false;  ///< reset momentum instead of stopping on a loss increase
    unsigned workers = 1;

    void validate() const {
        if (max_iter < 1) throw InvalidInput("solver: max_iter must be >= 1");
        if (tol < 0.0) throw InvalidInput("solver: tol must be >= 0");
        if (trace_every < 1) throw InvalidInput("solver: trace_every must be >= 1");
        if (!(step_size > 0.0) && step_size != 0.0) {
            throw InvalidInput("solver: step_size must be positive (or 0 for auto)");
        }
    }
};

struct TraceRecord {
    std::size_t iteration = 0;
    double loss = 0.0;
    double elapsed_ms = 0.0;
    bool loss_increased = false;
};

struct SolverTrace {
    std::vector<TraceRecord> records;
    TerminationReason reason = TerminationReason::kMaxIter;
    std::size_t iterations = 0;  ///< number of update steps performed
    double final_loss = 0.0;
    double step_size = 0.0;  ///< resolved step size actually used
};

struct SolverResult {
    MembershipMatrix membership;
    SolverTrace trace;
};

/// Inertial parameter recurrence t_{n+1} = (1 + sqrt(1 + 4 t_n^2)) / 2,
/// starting from t_1 = 1.
inline double fista_t_next(double t) { return (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0; }

/// Step-size bound 1/(4 ||S||_F + 12 N). The Lipschitz constant of the
/// gradient over the feasible set is 4 ||S||_2 + 12 N; the Frobenius norm
/// upper-bounds the spectral norm and is free to compute, so this step keeps
/// the descent guarantee while avoiding an eigensolve.
inline double default_step_size(const SparseSimilarity& s, std::size_t n) {
    return 1.0 / (4.0 * s.frob_norm() + 12.0 * static_cast<double>(n));
}

inline double resolve_step_size(const SolverConfig& config, const SparseSimilarity& s,
                                std::size_t n) {
    return config.step_size > 0.0 ? config.step_size : default_step_size(s, n);
}

/// One projected-gradient update with precomputed per-column products
/// xs (column i = X s_i).
inline MembershipMatrix gpa_step_fused(const MembershipMatrix& x, const ShareMatrix& share,
                                       const std::vector<double>& xs, double tau,
                                       unsigned workers = 1) {
    const std::size_t c = x.clusters();
    const std::size_t n = x.nodes();
    MembershipMatrix next(c, n);
    parallel_for_blocks(n, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<double> grad(c);
        for (std::size_t i = begin; i < end; ++i) {
            const std::span<const double> xs_i{xs.data() + i * c, c};
            const auto x_i = x.col(i);
            gradient_column_fused(share, xs_i, x_i, grad);
            auto out_i = next.col(i);
            for (std::size_t k = 0; k < c; ++k) out_i[k] = x_i[k] - tau * grad[k];
            project_simplex_inplace(out_i);
        }
    });
    return next;
}

/// x_i <- P_simplex(x_i - tau * grad_i) for every column.
inline MembershipMatrix gpa_step(const MembershipMatrix& x, const SparseSimilarity& s,
                                 const ShareMatrix& share, double tau, unsigned workers = 1) {
    const ColumnPass pass = fused_column_pass(x, s, workers);
    return gpa_step_fused(x, share, pass.xs, tau, workers);
}

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Gradient projection with the fused loss update. The loss at X^n is
/// evaluated from the same X s_i products the gradient step consumes; the
/// stopping test runs before the update, so the returned matrix is the last
/// iterate whose loss met the criterion.
inline SolverResult run_gpa(const MembershipMatrix& x0, const SparseSimilarity& s,
                            const SolverConfig& config) {
    config.validate();
    x0.validate(1e-9);
    if (s.size() != x0.nodes()) throw InvalidInput("run_gpa: similarity/membership size mismatch");

    const double tau = resolve_step_size(config, s, x0.nodes());
    const detail::Stopwatch clock;

    SolverResult result;
    result.membership = x0;
    result.trace.step_size = tau;
    const double n_sq =
        static_cast<double>(x0.nodes()) * static_cast<double>(x0.nodes());
    double loss_prev = n_sq;  // largest value the loss can take

    for (std::size_t n = 0;; ++n) {
        const ShareMatrix share = share_matrix(result.membership, config.workers);
        const ColumnPass pass = fused_column_pass(result.membership, s, config.workers);
        const double loss = s.frob_sq() + share.frob_sq() - 2.0 * pass.merge;
        const bool increased = n > 0 && loss > loss_prev;

        const bool stop_tol = loss_prev - loss <= config.tol;
        const bool stop_iter = n >= config.max_iter;
        if (stop_tol || stop_iter || n % config.trace_every == 0) {
            result.trace.records.push_back({n, loss, clock.elapsed_ms(), increased});
        }
        result.trace.iterations = n;
        result.trace.final_loss = loss;
        if (stop_tol) {
            result.trace.reason = TerminationReason::kTolReached;
            break;
        }
        if (stop_iter) {
            result.trace.reason = TerminationReason::kMaxIter;
            break;
        }

        result.membership =
            gpa_step_fused(result.membership, share, pass.xs, tau, config.workers);
        loss_prev = loss;
    }
    return result;
}

/// Parallel FISTA. Each iteration takes the basic projected-gradient step at
/// the extrapolated point, evaluates the loss at the projected iterate, and
/// stops once the loss stops decreasing by more than tol (a loss increase
/// also stops, unless fista_restart resets the momentum instead). Only the
/// projected iterate is ever returned; extrapolated points may leave the
/// feasible set.
inline SolverResult run_fista(const MembershipMatrix& x0, const SparseSimilarity& s,
                              const SolverConfig& config) {
    config.validate();
    x0.validate(1e-9);
    if (s.size() != x0.nodes()) {
        throw InvalidInput("run_fista: similarity/membership size mismatch");
    }

    const std::size_t c = x0.clusters();
    const std::size_t n_cols = x0.nodes();
    const double tau = resolve_step_size(config, s, n_cols);
    const detail::Stopwatch clock;

    SolverResult result;
    result.trace.step_size = tau;

    MembershipMatrix bar_prev = x0;  // Xbar^{n-1}
    MembershipMatrix extrapolated = x0;  // X^n (X^1 := Xbar^0)
    double loss_prev;
    {
        const ShareMatrix share0 = share_matrix(x0, config.workers);
        const ColumnPass pass0 = fused_column_pass(x0, s, config.workers);
        loss_prev = s.frob_sq() + share0.frob_sq() - 2.0 * pass0.merge;
        result.trace.records.push_back({0, loss_prev, clock.elapsed_ms(), false});
    }
    result.membership = x0;
    result.trace.final_loss = loss_prev;

    double t = 1.0;
    for (std::size_t n = 1; n <= config.max_iter; ++n) {
        const ShareMatrix share = share_matrix(extrapolated, config.workers);
        const ColumnPass pass = fused_column_pass(extrapolated, s, config.workers);
        MembershipMatrix bar = gpa_step_fused(extrapolated, share, pass.xs, tau, config.workers);

        const ShareMatrix share_bar = share_matrix(bar, config.workers);
        const ColumnPass pass_bar = fused_column_pass(bar, s, config.workers);
        const double loss = s.frob_sq() + share_bar.frob_sq() - 2.0 * pass_bar.merge;
        const bool increased = loss > loss_prev;

        const double decrease = loss_prev - loss;
        const bool stop_tol = decrease <= config.tol && !(increased && config.fista_restart);
        const bool stop_iter = n >= config.max_iter;
        if (stop_tol || stop_iter || n % config.trace_every == 0) {
            result.trace.records.push_back({n, loss, clock.elapsed_ms(), increased});
        }
        result.membership = bar;
        result.trace.iterations = n;
        result.trace.final_loss = loss;

        if (stop_tol) {
            result.trace.reason = increased ? TerminationReason::kLossIncreaseFista
                                            : TerminationReason::kTolReached;
            return result;
        }
        if (stop_iter) {
            result.trace.reason = TerminationReason::kMaxIter;
            return result;
        }

        if (increased && config.fista_restart) {
            t = 1.0;
            extrapolated = bar;
        } else {
            const double t_next = fista_t_next(t);
            const double beta = (t - 1.0) / t_next;
            MembershipMatrix next(c, n_cols);
            parallel_for_blocks(n_cols, config.workers,
                                [&](std::size_t, std::size_t begin, std::size_t end) {
                                    for (std::size_t i = begin; i < end; ++i) {
                                        const auto b = bar.col(i);
                                        const auto p = bar_prev.col(i);
                                        auto out = next.col(i);
                                        for (std::size_t k = 0; k < c; ++k) {
                                            out[k] = b[k] + beta * (b[k] - p[k]);
                                        }
                                    }
                                });
            extrapolated = std::move(next);
            t = t_next;
        }
        bar_prev = std::move(bar);
        loss_prev = loss;
    }
    return result;
}

inline SolverResult solve(const MembershipMatrix& x0, const SparseSimilarity& s,
                          const SolverConfig& config) {
    return config.method == Method::kFista ? run_fista(x0, s, config) : run_gpa(x0, s, config);
}

/// Trace CSV. Timing is opt-in: the default column set (iteration, loss) is a
/// pure function of the run inputs, so re-runs and different worker counts
/// produce byte-identical files.
inline void write_trace_csv(const SolverTrace& trace, std::ostream& out,
                            bool include_timing = false) {
    out << (include_timing ? "iteration,loss,elapsed_ms\n" : "iteration,loss\n");
    char buf[32];
    for (const auto& rec : trace.records) {
        std::snprintf(buf, sizeof buf, "%.17g", rec.loss);
        out << rec.iteration << ',' << buf;
        if (include_timing) {
            std::snprintf(buf, sizeof buf, "%.3f", rec.elapsed_ms);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace fuzzyclust
