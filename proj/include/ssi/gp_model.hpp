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

#ifndef SSI_GP_MODEL_HPP
#define SSI_GP_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "kernels.hpp"
#include "phase_space.hpp"

namespace ssi {

/// Paired flow observations ybar_j = phi_h(y_j).
struct FlowDataset {
    std::vector<PhaseState> inputs;  ///< Y
    std::vector<PhaseState> outputs; ///< Ybar
    double h = 0.0;

    void validate() const {
        if (inputs.empty()) throw ContractViolation("FlowDataset: empty");
        if (inputs.size() != outputs.size()) throw ContractViolation("FlowDataset: |Y| != |Ybar|");
        if (!(h > 0.0) || !std::isfinite(h)) throw ContractViolation("FlowDataset: h must be positive");
        const Index n = inputs.front().dim();
        for (std::size_t j = 0; j < inputs.size(); ++j)
            if (inputs[j].dim() != n || outputs[j].dim() != n)
                throw ContractViolation("FlowDataset: mixed dimensions at row " + std::to_string(j));
    }

    std::size_t size() const noexcept { return inputs.size(); }
    Index dim() const { return inputs.empty() ? 0 : inputs.front().dim(); }
};

enum class IntegratorTag { SymplecticEuler, ImplicitMidpoint };

inline std::string to_string(IntegratorTag tag) {
    return tag == IntegratorTag::SymplecticEuler ? "SE" : "MP";
}

inline IntegratorTag integrator_tag_from_string(const std::string& s) {
    if (s == "SE" || s == "se" || s == "symplectic_euler") return IntegratorTag::SymplecticEuler;
    if (s == "MP" || s == "mp" || s == "implicit_midpoint") return IntegratorTag::ImplicitMidpoint;
    throw ContractViolation("unknown integrator tag '" + s + "'");
}

/// Fixes the additive constant: the learned mean at `point` should equal `value`.
struct Normalization {
    PhaseState point;
    double value = 0.0;
};

struct LinearSystem {
    Matrix A;
    Vector b;
};

namespace detail {

// Rows j*2n .. j*2n+2n-1 hold grad_1 k(x_j, Z)^T (K + sigma I)^{-1}, where x_j is
// chosen by `eval_point`; the last row is the normalization.
template <typename EvalPoint>
LinearSystem assemble_system(const FlowDataset& data, const RegularizedGram& gram, const Normalization& norm,
                             const EvalPoint& eval_point) {
    data.validate();
    const Matrix& Z = gram.nodes();
    const Index d = Z.rows();
    if (2 * data.dim() != d) throw ContractViolation("assemble_system: dataset and node dimensions differ");
    if (norm.point.coords().size() != d)
        throw ContractViolation("assemble_system: normalization point has wrong dimension");
    const Index N = Z.cols();
    const Index M = static_cast<Index>(data.size());
    const double h = data.h;

    // G^T with G the stacked gradient rows: column block j is grad_1 k(x_j, Z).
    Matrix Gt(N, d * M + 1);
    Vector b(d * M + 1);
    for (Index j = 0; j < M; ++j) {
        const auto& y = data.inputs[static_cast<std::size_t>(j)];
        const auto& ybar = data.outputs[static_cast<std::size_t>(j)];
        const Vector x = eval_point(y, ybar);
        Gt.middleCols(j * d, d) = kernel_gradient_block(x, Z, gram.params()).transpose();
        b.segment(j * d, d) = apply_symplectic(ybar.coords() - y.coords()) / h;
    }
    Gt.col(d * M) = kernel_vector(norm.point.coords(), Z, gram.params());
    b(d * M) = norm.value;

    // A = G (K + sigma I)^{-1}; K is symmetric so A^T = (K + sigma I)^{-1} G^T.
    LinearSystem sys;
    sys.A = gram.solve(Gt).transpose();
    sys.b = std::move(b);
    return sys;
}

} // namespace detail

/// Least-squares system for the Symplectic Euler inverse modified Hamiltonian.
/// Gradient rows are evaluated at (qbar_j, p_j): new position, old momentum.
inline LinearSystem assemble_se_system(const FlowDataset& data, const RegularizedGram& gram, const Normalization& norm) {
    return detail::assemble_system(data, gram, norm, [](const PhaseState& y, const PhaseState& ybar) {
        Vector x(y.coords().size());
        x << ybar.q(), y.p();
        return x;
    });
}

/// Same system for the implicit midpoint rule; rows evaluated at (y_j + ybar_j) / 2.
inline LinearSystem assemble_mp_system(const FlowDataset& data, const RegularizedGram& gram, const Normalization& norm) {
    return detail::assemble_system(data, gram, norm, [](const PhaseState& y, const PhaseState& ybar) {
        return Vector(0.5 * (y.coords() + ybar.coords()));
    });
}

inline LinearSystem assemble_se_system(const FlowDataset& data, std::span<const PhaseState> nodes,
                                       const KernelParams& params, double sigma, const Normalization& norm) {
    return assemble_se_system(data, factorize_regularized(nodes, params, sigma), norm);
}

inline LinearSystem assemble_mp_system(const FlowDataset& data, std::span<const PhaseState> nodes,
                                       const KernelParams& params, double sigma, const Normalization& norm) {
    return assemble_mp_system(data, factorize_regularized(nodes, params, sigma), norm);
}

/// Outcome of the least-squares fit.
struct FitDiagnostics {
    double residual = 0.0; ///< |A v - b|_2
    Index rows = 0;
    Index cols = 0;
    Index rank = 0;
    double sigma_requested = 0.0;
    std::vector<std::string> warnings;
};

/// Learned inverse modified Hamiltonian: the GP posterior mean conditioned on
/// node values Hbar(Z).
class GpHamiltonianModel {
public:
    GpHamiltonianModel(RegularizedGram gram, Vector node_values, IntegratorTag tag, double h, Normalization norm,
                       FitDiagnostics diagnostics = {})
        : gram_(std::move(gram)), values_(std::move(node_values)), tag_(tag), h_(h), norm_(std::move(norm)),
          diag_(std::move(diagnostics)) {
        if (values_.size() != gram_.size()) throw ContractViolation("GpHamiltonianModel: node_values has wrong length");
        if (!values_.allFinite()) throw NumericalError("GpHamiltonianModel: non-finite node values");
        weights_ = gram_.solve(values_);
        inv_e2_ = 1.0 / (gram_.params().e * gram_.params().e);
    }

    Index dim() const noexcept { return gram_.nodes().rows() / 2; }
    const Matrix& nodes() const noexcept { return gram_.nodes(); }
    const Vector& node_values() const noexcept { return values_; }
    /// (K + sigma I)^{-1} Hbar(Z)
    const Vector& weights() const noexcept { return weights_; }
    const KernelParams& params() const noexcept { return gram_.params(); }
    double sigma() const noexcept { return gram_.sigma(); }
    const RegularizedGram& gram() const noexcept { return gram_; }
    IntegratorTag integrator() const noexcept { return tag_; }
    double h() const noexcept { return h_; }
    const Normalization& normalization() const noexcept { return norm_; }
    double residual() const noexcept { return diag_.residual; }
    const FitDiagnostics& diagnostics() const noexcept { return diag_; }

    double mean(const Eigen::Ref<const Vector>& y) const {
        check(y.size(), "gp_mean");
        const Matrix& Z = nodes();
        const double kc = params().k_c;
        double s = 0.0;
        for (Index i = 0; i < Z.cols(); ++i) s += weights_(i) * kc * std::exp(-(y - Z.col(i)).squaredNorm() * inv_e2_);
        return s;
    }

    Vector gradient(const Eigen::Ref<const Vector>& y) const {
        check(y.size(), "gp_grad");
        const Matrix& Z = nodes();
        const Index d = Z.rows();
        const double c = -2.0 * inv_e2_ * params().k_c;
        Vector g = Vector::Zero(d);
        Vector diff(d);
        for (Index i = 0; i < Z.cols(); ++i) {
            diff = y - Z.col(i);
            g.noalias() += (weights_(i) * c * std::exp(-diff.squaredNorm() * inv_e2_)) * diff;
        }
        return g;
    }

    Matrix hessian(const Eigen::Ref<const Vector>& y) const {
        check(y.size(), "gp_hess");
        const Matrix& Z = nodes();
        const Index d = Z.rows();
        Matrix H = Matrix::Zero(d, d);
        Vector diff(d);
        double diag = 0.0;
        for (Index i = 0; i < Z.cols(); ++i) {
            diff = y - Z.col(i);
            const double wk = weights_(i) * params().k_c * std::exp(-diff.squaredNorm() * inv_e2_);
            H.noalias() += (4.0 * inv_e2_ * inv_e2_ * wk) * (diff * diff.transpose());
            diag += wk;
        }
        H.diagonal().array() -= 2.0 * inv_e2_ * diag;
        // Sum of symmetric rank-one terms; mirror to make symmetry exact.
        return 0.5 * (H + H.transpose());
    }

private:
    void check(Index size, const char* where) const {
        if (size != nodes().rows())
            throw ContractViolation(std::string(where) + ": expected dimension " + std::to_string(nodes().rows()) +
                                    ", got " + std::to_string(size));
    }

    RegularizedGram gram_;
    Vector values_;
    Vector weights_;
    IntegratorTag tag_;
    double h_;
    Normalization norm_;
    FitDiagnostics diag_;
    double inv_e2_ = 1.0;
};

inline double gp_mean(const GpHamiltonianModel& model, const PhaseState& y) { return model.mean(y.coords()); }
inline Vector gp_grad(const GpHamiltonianModel& model, const PhaseState& y) { return model.gradient(y.coords()); }
inline Matrix gp_hess(const GpHamiltonianModel& model, const PhaseState& y) { return model.hessian(y.coords()); }

struct TrainOptions {
    /// Upper bound of the sigma escalation ladder (x100 per retry).
    double sigma_max = 1e-7;
};

/// Solves the assembled system in the least-squares sense with a complete
/// orthogonal decomposition (minimum-norm solution when rank deficient).
inline GpHamiltonianModel train(const FlowDataset& data, std::span<const PhaseState> nodes, const KernelParams& params,
                                double sigma, IntegratorTag tag, const Normalization& norm,
                                const TrainOptions& options = {}) {
    data.validate();
    params.validate();
    RegularizedGram gram = factorize_with_retry(nodes_to_matrix(nodes), params, sigma, std::max(sigma, options.sigma_max));
    FitDiagnostics diag;
    diag.sigma_requested = sigma;
    if (gram.sigma() != sigma)
        diag.warnings.push_back("regularization escalated from " + sci(sigma) + " to " +
                                sci(gram.sigma()));

    const LinearSystem sys = tag == IntegratorTag::SymplecticEuler ? assemble_se_system(data, gram, norm)
                                                                   : assemble_mp_system(data, gram, norm);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sys.A);
    Vector v = cod.solve(sys.b);
    diag.rows = sys.A.rows();
    diag.cols = sys.A.cols();
    diag.rank = cod.rank();
    diag.residual = (sys.A * v - sys.b).norm();
    if (diag.rank < diag.cols)
        diag.warnings.push_back("least-squares matrix is rank deficient (rank " + std::to_string(diag.rank) + " of " +
                                std::to_string(diag.cols) + "); minimum-norm solution returned");
    return GpHamiltonianModel(std::move(gram), std::move(v), tag, data.h, norm, std::move(diag));
}

/// Adapts a trained model to the HamiltonianField interface. Holds a reference:
/// the model must outlive the field.
class GpField final : public HamiltonianField {
public:
    explicit GpField(const GpHamiltonianModel& model) : model_(&model) {}

    Index dim() const override { return model_->dim(); }
    double value(const PhaseState& z) const override { return gp_mean(*model_, z); }
    Vector gradient(const PhaseState& z) const override { return gp_grad(*model_, z); }
    Matrix hessian(const PhaseState& z) const override { return gp_hess(*model_, z); }
    std::string name() const override { return "gp_inverse_modified"; }

    const GpHamiltonianModel& model() const noexcept { return *model_; }

private:
    const GpHamiltonianModel* model_;
};

inline GpField as_field(const GpHamiltonianModel& model) { return GpField(model); }

} // namespace ssi

#endif // SSI_GP_MODEL_HPP
