/*
 * Copyright 2026 The SSI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef SSI_KERNELS_HPP
#define SSI_KERNELS_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "phase_space.hpp"

namespace ssi {

/// Parameters of the RBF kernel k(x,y) = k_c exp(-|x-y|^2 / e^2).
struct KernelParams {
    double k_c = 1.0; ///< signal scale
    double e = 1.0;   ///< length scale

    void validate() const {
        if (!(k_c > 0.0) || !std::isfinite(k_c)) throw ContractViolation("KernelParams: k_c must be positive");
        if (!(e > 0.0) || !std::isfinite(e)) throw ContractViolation("KernelParams: e must be positive");
    }
};

namespace detail {
inline void require_same_size(Index a, Index b, const char* where) {
    if (a != b)
        throw ContractViolation(std::string(where) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
}
} // namespace detail

inline double rbf_eval(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                       const KernelParams& params) {
    detail::require_same_size(x.size(), y.size(), "rbf_eval");
    return params.k_c * std::exp(-(x - y).squaredNorm() / (params.e * params.e));
}

/// dk/dx = -(2/e^2)(x - y) k(x, y).
inline Vector rbf_grad1(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                        const KernelParams& params) {
    detail::require_same_size(x.size(), y.size(), "rbf_grad1");
    const double inv_e2 = 1.0 / (params.e * params.e);
    const Vector d = x - y;
    return (-2.0 * inv_e2 * params.k_c * std::exp(-d.squaredNorm() * inv_e2)) * d;
}

/// d^2k/dx^2 = [(4/e^4)(x-y)(x-y)^T - (2/e^2) I] k(x, y).
inline Matrix rbf_hess1(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                        const KernelParams& params) {
    detail::require_same_size(x.size(), y.size(), "rbf_hess1");
    const double inv_e2 = 1.0 / (params.e * params.e);
    const Vector d = x - y;
    const double k = params.k_c * std::exp(-d.squaredNorm() * inv_e2);
    const double c = 4.0 * inv_e2 * inv_e2 * k;
    const Index m = d.size();
    Matrix H(m, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = j; i < m; ++i) H(i, j) = H(j, i) = c * d(i) * d(j);
    H.diagonal().array() -= 2.0 * inv_e2 * k;
    return H;
}

inline double rbf_eval(const PhaseState& x, const PhaseState& y, const KernelParams& params) {
    return rbf_eval(x.coords(), y.coords(), params);
}
inline Vector rbf_grad1(const PhaseState& x, const PhaseState& y, const KernelParams& params) {
    return rbf_grad1(x.coords(), y.coords(), params);
}
inline Matrix rbf_hess1(const PhaseState& x, const PhaseState& y, const KernelParams& params) {
    return rbf_hess1(x.coords(), y.coords(), params);
}

/// Packs a node list into a (2n x N) matrix, one node per column.
inline Matrix nodes_to_matrix(std::span<const PhaseState> nodes) {
    if (nodes.empty()) throw DomainError("node list is empty");
    const Index d = nodes.front().coords().size();
    Matrix Z(d, static_cast<Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        detail::require_same_size(nodes[i].coords().size(), d, "nodes_to_matrix");
        Z.col(static_cast<Index>(i)) = nodes[i].coords();
    }
    return Z;
}

inline std::vector<PhaseState> matrix_to_nodes(const Matrix& Z) {
    std::vector<PhaseState> out;
    out.reserve(static_cast<std::size_t>(Z.cols()));
    for (Index i = 0; i < Z.cols(); ++i) out.emplace_back(Vector(Z.col(i)));
    return out;
}

/// k(Z,Z) for nodes stored column-wise. The upper triangle is mirrored, so the
/// result is exactly symmetric.
inline Matrix gram_matrix(const Matrix& Z, const KernelParams& params) {
    if (Z.cols() == 0) throw DomainError("gram_matrix: empty node list");
    params.validate();
    const Index N = Z.cols();
    const double inv_e2 = 1.0 / (params.e * params.e);
    Matrix K(N, N);
    for (Index j = 0; j < N; ++j) {
        K(j, j) = params.k_c;
        for (Index i = j + 1; i < N; ++i) {
            const double v = params.k_c * std::exp(-(Z.col(i) - Z.col(j)).squaredNorm() * inv_e2);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

inline Matrix gram_matrix(std::span<const PhaseState> nodes, const KernelParams& params) {
    return gram_matrix(nodes_to_matrix(nodes), params);
}

/// k(x, Z) as a length-N vector.
inline Vector kernel_vector(const Eigen::Ref<const Vector>& x, const Matrix& Z, const KernelParams& params) {
    detail::require_same_size(x.size(), Z.rows(), "kernel_vector");
    const double inv_e2 = 1.0 / (params.e * params.e);
    Vector k(Z.cols());
    for (Index i = 0; i < Z.cols(); ++i) k(i) = params.k_c * std::exp(-(x - Z.col(i)).squaredNorm() * inv_e2);
    return k;
}

/// Rows are grad_1 k(x, z_i)^T, i.e. the (2n x N) matrix with column i = dk/dx(x, z_i).
inline Matrix kernel_gradient_block(const Eigen::Ref<const Vector>& x, const Matrix& Z, const KernelParams& params) {
    detail::require_same_size(x.size(), Z.rows(), "kernel_gradient_block");
    const double inv_e2 = 1.0 / (params.e * params.e);
    Matrix G(Z.rows(), Z.cols());
    for (Index i = 0; i < Z.cols(); ++i) {
        const Vector d = x - Z.col(i);
        const double k = params.k_c * std::exp(-d.squaredNorm() * inv_e2);
        G.col(i) = (-2.0 * inv_e2 * k) * d;
    }
    return G;
}

/// Cholesky factorization of k(Z,Z) + sigma I.
class RegularizedGram {
public:
    RegularizedGram(Matrix nodes, KernelParams params, double sigma, Eigen::LLT<Matrix> llt)
        : nodes_(std::move(nodes)), params_(params), sigma_(sigma), llt_(std::move(llt)) {}

    const Matrix& nodes() const noexcept { return nodes_; }
    const KernelParams& params() const noexcept { return params_; }
    double sigma() const noexcept { return sigma_; }
    Index size() const noexcept { return nodes_.cols(); }

    template <typename Rhs>
    Matrix solve(const Eigen::MatrixBase<Rhs>& rhs) const {
        detail::require_same_size(rhs.rows(), size(), "RegularizedGram::solve");
        return llt_.solve(rhs);
    }

    Vector solve(const Vector& rhs) const {
        detail::require_same_size(rhs.size(), size(), "RegularizedGram::solve");
        return llt_.solve(rhs);
    }

    /// L L^T, which should reproduce k(Z,Z) + sigma I.
    Matrix reconstruct() const {
        const Matrix L = llt_.matrixL();
        return L * L.transpose();
    }

    Vector pivots() const { return Matrix(llt_.matrixL()).diagonal(); }

private:
    Matrix nodes_;
    KernelParams params_;
    double sigma_;
    Eigen::LLT<Matrix> llt_;
};

namespace detail {
// Unblocked Cholesky used only to locate the failing column for diagnostics.
inline Index first_bad_pivot(Matrix A) {
    const Index N = A.rows();
    for (Index j = 0; j < N; ++j) {
        double d = A(j, j) - A.row(j).head(j).squaredNorm();
        if (!(d > 0.0)) return j;
        d = std::sqrt(d);
        A(j, j) = d;
        for (Index i = j + 1; i < N; ++i) A(i, j) = (A(i, j) - A.row(i).head(j).dot(A.row(j).head(j))) / d;
        A.col(j).head(j).setZero();
    }
    return -1;
}
} // namespace detail

/// Factorizes k(Z,Z) + sigma I. Throws FactorizationError (with the offending
/// pivot index) when the regularized matrix is numerically indefinite.
inline RegularizedGram factorize_regularized(const Matrix& Z, const KernelParams& params, double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ContractViolation("factorize_regularized: sigma must be >= 0");
    Matrix K = gram_matrix(Z, params);
    K.diagonal().array() += sigma;
    Eigen::LLT<Matrix> llt(K);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        const Vector diag = Matrix(llt.matrixL()).diagonal();
        ok = diag.allFinite() && (diag.array() > 0.0).all();
    }
    if (!ok) {
        const Index pivot = detail::first_bad_pivot(K);
        throw FactorizationError("factorize_regularized: k(Z,Z) + sigma I is not numerically positive definite "
                                 "(sigma=" + sci(sigma) + ", pivot " + std::to_string(pivot) + ")",
                                 pivot, sigma);
    }
    return RegularizedGram(Z, params, sigma, std::move(llt));
}

inline RegularizedGram factorize_regularized(std::span<const PhaseState> nodes, const KernelParams& params,
                                             double sigma) {
    return factorize_regularized(nodes_to_matrix(nodes), params, sigma);
}

/// Escalates sigma by `growth` until the factorization succeeds or sigma would
/// exceed `sigma_max`; rethrows the last failure in that case.
inline RegularizedGram factorize_with_retry(const Matrix& Z, const KernelParams& params, double sigma,
                                            double sigma_max = 1e-7, double growth = 100.0) {
    double s = sigma;
    for (;;) {
        try {
            return factorize_regularized(Z, params, s);
        } catch (const FactorizationError&) {
            const double next = (s == 0.0) ? 1e-15 : s * growth;
            if (next > sigma_max * (1.0 + 1e-12)) throw;
            s = next;
        }
    }
}

} // namespace ssi

#endif // SSI_KERNELS_HPP
