#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fuzzyclust/common.hpp"
#include "fuzzyclust/dense.hpp"
#include "fuzzyclust/parallel.hpp"
#include "fuzzyclust/sparse.hpp"

namespace fuzzyclust {

/// Dense C x C matrix, row-major. Holds X X^T (and V X^T in the Hessian
/// path): the compact product shared across all column updates.
class ShareMatrix {
public:
    ShareMatrix() = default;
    explicit ShareMatrix(std::size_t c) : c_(c), values_(c * c, 0.0) {}

    std::size_t dim() const { return c_; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * c_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * c_ + c]; }

    double frob_sq() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return s;
    }

    double trace() const {
        double s = 0.0;
        for (std::size_t k = 0; k < c_; ++k) s += (*this)(k, k);
        return s;
    }

    void apply(std::span<const double> y, std::span<double> out) const {
        for (std::size_t k = 0; k < c_; ++k) {
            double acc = 0.0;
            for (std::size_t l = 0; l < c_; ++l) acc += values_[k * c_ + l] * y[l];
            out[k] = acc;
        }
    }

    /// out = M^T y (used for the A^T x term of the Hessian).
    void transpose_apply(std::span<const double> y, std::span<double> out) const {
        for (std::size_t k = 0; k < c_; ++k) {
            double acc = 0.0;
            for (std::size_t l = 0; l < c_; ++l) acc += values_[l * c_ + k] * y[l];
            out[k] = acc;
        }
    }

private:
    std::size_t c_ = 0;
    std::vector<double> values_;
};

/// A B^T for C x N matrices A, B (column blocks reduced in fixed ascending
/// order, so the result is independent of the worker count).
inline ShareMatrix cross_share(const DenseMatrix& a, const DenseMatrix& b,
                               unsigned workers = 1) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidInput("cross_share: shape mismatch");
    }
    const std::size_t c = a.rows();
    const std::size_t n = a.cols();
    const std::size_t blocks = block_count(n);
    std::vector<double> partial(blocks * c * c, 0.0);

    parallel_for_blocks(n, workers, [&](std::size_t blk, std::size_t begin, std::size_t end) {
        double* acc = partial.data() + blk * c * c;
        for (std::size_t i = begin; i < end; ++i) {
            const auto ca = a.col(i);
            const auto cb = b.col(i);
            for (std::size_t r = 0; r < c; ++r) {
                for (std::size_t s = 0; s < c; ++s) acc[r * c + s] += ca[r] * cb[s];
            }
        }
    });

    ShareMatrix out(c);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        const double* acc = partial.data() + blk * c * c;
        for (std::size_t r = 0; r < c; ++r) {
            for (std::size_t s = 0; s < c; ++s) out(r, s) += acc[r * c + s];
        }
    }
    return out;
}

/// share = X X^T, the per-iteration C x C product.
inline ShareMatrix share_matrix(const DenseMatrix& x, unsigned workers = 1) {
    return cross_share(x, x, workers);
}

/// out = X s_i, accumulating only the nonzeros of the sparse column.
inline void similarity_column_product(const DenseMatrix& x, const SparseSimilarity& s,
                                      std::size_t i, std::span<double> out) {
    const std::size_t c = x.rows();
    for (std::size_t k = 0; k < c; ++k) out[k] = 0.0;
    const auto rows = s.col_rows(i);
    const auto vals = s.col_values(i);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto xj = x.col(rows[k]);
        const double w = vals[k];
        for (std::size_t r = 0; r < c; ++r) out[r] += w * xj[r];
    }
}

/// Column i of the gradient: -4 (X s_i - share x_i), given the precomputed
/// xs_i = X s_i from the fused pass.
inline void gradient_column_fused(const ShareMatrix& share, std::span<const double> xs_i,
                                  std::span<const double> x_i, std::span<double> out) {
    const std::size_t c = share.dim();
    share.apply(x_i, out);
    for (std::size_t k = 0; k < c; ++k) out[k] = -4.0 * (xs_i[k] - out[k]);
}

/// Column i of the gradient, computing X s_i on the fly.
inline std::vector<double> gradient_column(const DenseMatrix& x, const ShareMatrix& share,
                                           const SparseSimilarity& s, std::size_t i) {
    std::vector<double> xs(x.rows());
    similarity_column_product(x, s, i, xs);
    std::vector<double> out(x.rows());
    gradient_column_fused(share, xs, x.col(i), out);
    return out;
}

/// prod_i = <X s_i, x_i>, the per-column term of <X^T X, S>_F.
inline double loss_terms_column(std::span<const double> xs_i, std::span<const double> x_i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < x_i.size(); ++k) acc += xs_i[k] * x_i[k];
    return acc;
}

inline double loss_terms_column(const DenseMatrix& x, const SparseSimilarity& s, std::size_t i) {
    std::vector<double> xs(x.rows());
    similarity_column_product(x, s, i, xs);
    return loss_terms_column(xs, x.col(i));
}

/// One fused sweep per iteration: xs stores X s_i for every column (reused
/// by the gradient step), merge is sum_i prod_i reduced in fixed block
/// order.
struct ColumnPass {
    std::vector<double> xs;  ///< C x N, column-major, column i = X s_i
    double merge = 0.0;
};

inline ColumnPass fused_column_pass(const DenseMatrix& x, const SparseSimilarity& s,
                                    unsigned workers = 1) {
    const std::size_t c = x.rows();
    const std::size_t n = x.cols();
    if (s.size() != n) throw InvalidInput("objective: similarity/membership size mismatch");

    ColumnPass pass;
    pass.xs.assign(c * n, 0.0);
    const std::size_t blocks = block_count(n);
    std::vector<double> partial_merge(blocks, 0.0);

    parallel_for_blocks(n, workers, [&](std::size_t blk, std::size_t begin, std::size_t end) {
        double local = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            std::span<double> xs_i{pass.xs.data() + i * c, c};
            similarity_column_product(x, s, i, xs_i);
            local += loss_terms_column(xs_i, x.col(i));
        }
        partial_merge[blk] = local;
    });
    for (std::size_t blk = 0; blk < blocks; ++blk) pass.merge += partial_merge[blk];
    return pass;
}

/// f(X) = ||S||_F^2 + ||X X^T||_F^2 - 2 sum_i <X s_i, x_i>.
inline double loss_decomposed(const DenseMatrix& x, const SparseSimilarity& s,
                              const ShareMatrix& share, unsigned workers = 1) {
    const ColumnPass pass = fused_column_pass(x, s, workers);
    return s.frob_sq() + share.frob_sq() - 2.0 * pass.merge;
}

/// Hessian-vector product at xbar applied to v:
///   -4 V (S - X^T X) + 4 X (V^T X + X^T V),
/// evaluated column-wise without materializing S - X^T X. With A = V X^T and
/// B = X X^T, column i is -4 (V s_i - A x_i - A^T x_i - B v_i).
inline DenseMatrix hessian_vector_product(const DenseMatrix& xbar, const DenseMatrix& v,
                                          const SparseSimilarity& s, unsigned workers = 1) {
    if (xbar.rows() != v.rows() || xbar.cols() != v.cols()) {
        throw InvalidInput("hessian_vector_product: shape mismatch");
    }
    if (s.size() != xbar.cols()) {
        throw InvalidInput("hessian_vector_product: similarity size mismatch");
    }
    const std::size_t c = xbar.rows();
    const std::size_t n = xbar.cols();
    const ShareMatrix a = cross_share(v, xbar, workers);
    const ShareMatrix b = share_matrix(xbar, workers);

    DenseMatrix out(c, n);
    parallel_for_blocks(n, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<double> vs(c);
        std::vector<double> ax(c);
        std::vector<double> atx(c);
        std::vector<double> bv(c);
        for (std::size_t i = begin; i < end; ++i) {
            similarity_column_product(v, s, i, vs);
            a.apply(xbar.col(i), ax);
            a.transpose_apply(xbar.col(i), atx);
            b.apply(v.col(i), bv);
            auto out_i = out.col(i);
            for (std::size_t k = 0; k < c; ++k) {
                out_i[k] = -4.0 * (vs[k] - ax[k] - atx[k] - bv[k]);
            }
        }
    });
    return out;
}

/// <H(xbar) v, v>_F.
inline double quadratic_form(const DenseMatrix& xbar, const DenseMatrix& v,
                             const SparseSimilarity& s, unsigned workers = 1) {
    return frob_inner(hessian_vector_product(xbar, v, s, workers), v);
}

// ---------------------------------------------------------------------------
// Dense reference oracles. Textbook evaluations that materialize the N x N
// similarity; guarded so production paths cannot blow up on large inputs.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDenseOracleMaxN = 5000;

/// Row-major dense copy of S.
inline std::vector<double> dense_similarity(const SparseSimilarity& s) {
    const std::size_t n = s.size();
    if (n > kDenseOracleMaxN) throw InvalidInput("dense oracle: N exceeds guard");
    std::vector<double> dense(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto rows = s.col_rows(j);
        const auto vals = s.col_values(j);
        for (std::size_t k = 0; k < rows.size(); ++k) dense[rows[k] * n + j] = vals[k];
    }
    return dense;
}

namespace detail {

/// M = S - X^T X, dense row-major.
inline std::vector<double> residual_dense(const DenseMatrix& x, std::span<const double> s_dense) {
    const std::size_t c = x.rows();
    const std::size_t n = x.cols();
    if (n > kDenseOracleMaxN) throw InvalidInput("dense oracle: N exceeds guard");
    if (s_dense.size() != n * n) throw InvalidInput("dense oracle: similarity shape mismatch");
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ci = x.col(i);
        for (std::size_t j = 0; j < n; ++j) {
            const auto cj = x.col(j);
            double dot = 0.0;
            for (std::size_t k = 0; k < c; ++k) dot += ci[k] * cj[k];
            m[i * n + j] = s_dense[i * n + j] - dot;
        }
    }
    return m;
}

}  // namespace detail

/// nabla f(X) = -4 X (S - X^T X), evaluated densely. Accepts any X in
/// R^{C x N}; test oracle only.
inline DenseMatrix gradient_dense_reference(const DenseMatrix& x,
                                            std::span<const double> s_dense) {
    const std::size_t c = x.rows();
    const std::size_t n = x.cols();
    const auto m = detail::residual_dense(x, s_dense);
    DenseMatrix out(c, n);
    for (std::size_t j = 0; j < n; ++j) {
        auto out_j = out.col(j);
        for (std::size_t k = 0; k < c; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += x(k, i) * m[i * n + j];
            out_j[k] = -4.0 * acc;
        }
    }
    return out;
}

/// f(X) = ||S - X^T X||_F^2, evaluated densely.
inline double loss_dense_reference(const DenseMatrix& x, std::span<const double> s_dense) {
    const std::size_t n = x.cols();
    const auto m = detail::residual_dense(x, s_dense);
    double acc = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) acc += m[i] * m[i];
    return acc;
}

/// Hessian-vector product via the dense contract formula
/// -4 V (S - X^T X) + 4 X (V^T X + X^T V).
inline DenseMatrix hvp_dense_reference(const DenseMatrix& xbar, const DenseMatrix& v,
                                       std::span<const double> s_dense) {
    const std::size_t c = xbar.rows();
    const std::size_t n = xbar.cols();
    const auto m = detail::residual_dense(xbar, s_dense);
    DenseMatrix out(c, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < c; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += v(k, i) * m[i * n + j];
            out(k, j) = -4.0 * acc;
        }
    }
    std::vector<double> w(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < c; ++k) {
                acc += v(k, i) * xbar(k, j) + xbar(k, i) * v(k, j);
            }
            w[i * n + j] = acc;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < c; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += xbar(k, i) * w[i * n + j];
            out(k, j) += 4.0 * acc;
        }
    }
    return out;
}

}  // namespace fuzzyclust
