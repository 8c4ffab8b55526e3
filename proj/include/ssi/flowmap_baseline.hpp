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

#ifndef SSI_FLOWMAP_BASELINE_HPP
#define SSI_FLOWMAP_BASELINE_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "gp_model.hpp"
#include "kernels.hpp"

namespace ssi {

/// Structure-agnostic baseline: one zero-mean GP per output coordinate,
/// fitted directly to (Y, Ybar) with shared RBF hyperparameters.
class FlowMapGpModel {
public:
    FlowMapGpModel(RegularizedGram gram, Matrix targets, double log_marginal_likelihood)
        : gram_(std::move(gram)), weights_(gram_.solve(targets)), lml_(log_marginal_likelihood) {}

    Index dim() const noexcept { return gram_.nodes().rows() / 2; }
    const KernelParams& params() const noexcept { return gram_.params(); }
    double noise() const noexcept { return gram_.sigma(); }
    double log_marginal_likelihood() const noexcept { return lml_; }
    const Matrix& nodes() const noexcept { return gram_.nodes(); }

    Vector predict(const Eigen::Ref<const Vector>& z) const {
        return weights_.transpose() * kernel_vector(z, gram_.nodes(), gram_.params());
    }

private:
    RegularizedGram gram_;
    Matrix weights_; // N x 2n
    double lml_;
};

inline PhaseState predict_flowmap(const FlowMapGpModel& model, const PhaseState& z) {
    if (2 * z.dim() != model.nodes().rows()) throw ContractViolation("predict_flowmap: dimension mismatch");
    return PhaseState(model.predict(z.coords()));
}

/// Standard grid: k_c in {0.1, 1, 10}, eight log-spaced length scales from
/// diameter/8 to 4 x diameter.
inline std::vector<KernelParams> default_flowmap_param_grid(double domain_diameter) {
    std::vector<KernelParams> grid;
    for (double kc : {0.1, 1.0, 10.0})
        for (int i = 0; i < 8; ++i)
            grid.push_back({kc, domain_diameter / 8.0 * std::pow(32.0, i / 7.0)});
    return grid;
}

inline std::vector<double> default_flowmap_noise_grid() { return {1e-10, 1e-8, 1e-6}; }

/// Gaussian log marginal likelihood summed over output columns.
inline double log_marginal_likelihood(const RegularizedGram& gram, const Matrix& targets) {
    const Matrix alpha = gram.solve(targets);
    const double log_det = 2.0 * gram.pivots().array().log().sum();
    const double N = static_cast<double>(targets.rows());
    double lml = 0.0;
    for (Index d = 0; d < targets.cols(); ++d)
        lml += -0.5 * targets.col(d).dot(alpha.col(d)) - 0.5 * log_det - 0.5 * N * std::log(2.0 * std::numbers::pi);
    return lml;
}

/// Grid search over (params, noise) maximizing the log marginal likelihood.
/// Candidates whose regularized Gram is not positive definite are skipped.
inline FlowMapGpModel fit_flowmap_baseline(const FlowDataset& data, const std::vector<KernelParams>& param_grid,
                                           const std::vector<double>& noise_grid) {
    data.validate();
    if (param_grid.empty() || noise_grid.empty()) throw ContractViolation("fit_flowmap_baseline: empty grid");
    const Matrix Z = nodes_to_matrix(data.inputs);
    const Matrix targets = nodes_to_matrix(data.outputs).transpose();
    std::optional<RegularizedGram> best;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (const auto& params : param_grid) {
        params.validate();
        for (double noise : noise_grid) {
            try {
                RegularizedGram gram = factorize_regularized(Z, params, noise);
                const double lml = log_marginal_likelihood(gram, targets);
                if (std::isfinite(lml) && lml > best_lml) {
                    best_lml = lml;
                    best.emplace(std::move(gram));
                }
            } catch (const FactorizationError&) {
            }
        }
    }
    if (!best) throw NumericalError("fit_flowmap_baseline: every grid candidate was numerically indefinite");
    return FlowMapGpModel(std::move(*best), targets, best_lml);
}

} // namespace ssi

#endif // SSI_FLOWMAP_BASELINE_HPP
