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

#ifndef SSI_BEA_HPP
#define SSI_BEA_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gp_model.hpp"
#include "phase_space.hpp"
#include "sampling.hpp"

namespace ssi {

/// Truncation index of a modified-Hamiltonian series, 0..3.
class TruncationOrder {
public:
    explicit TruncationOrder(int order) : order_(order) {
        if (order < 0 || order > 3) throw DomainError("TruncationOrder: order must be in [0, 3]");
    }
    int value() const noexcept { return order_; }

private:
    int order_;
};

namespace detail {

struct SeriesTerms {
    double value;
    double first;  // H_q^T H_p
    double second; // components A, B, C combined by the caller
    double a, b, c;
};

// Hessian blocks in (q, p) ordering: H_qq top-left, H_pp bottom-right,
// H_qp top-right with (H_qp)_{ij} = d^2H / dq_i dp_j.
inline SeriesTerms se_terms(const HamiltonianField& field, const PhaseState& z, bool need_second) {
    require_same_dim(field, z, "se_terms");
    const Index n = z.dim();
    SeriesTerms t{};
    t.value = field.value(z);
    const Vector g = field.gradient(z);
    const auto Hq = g.head(n);
    const auto Hp = g.tail(n);
    t.first = Hq.dot(Hp);
    if (need_second) {
        const Matrix H = field.hessian(z);
        t.a = Hq.dot(H.bottomRightCorner(n, n) * Hq);
        t.b = Hp.dot(H.topLeftCorner(n, n) * Hp);
        t.c = Hp.dot(H.topRightCorner(n, n) * Hq);
    }
    return t;
}

inline void require_se_order(const TruncationOrder& order) {
    if (order.value() > 2) throw DomainError("Symplectic Euler series is only available up to order 2");
}

// f^T Hess(H) f with f = J^{-1} grad H.
inline double mp_term(const HamiltonianField& field, const PhaseState& z) {
    const Vector f = hamiltonian_vector_field(field, z);
    return f.dot(field.hessian(z) * f);
}

} // namespace detail

/// Modified Hamiltonian of Symplectic Euler (implicit position update),
/// truncated at h^order:
///   H + (h/2) H_q^T H_p + (h^2/12)(H_q^T H_pp H_q + H_p^T H_qq H_p + 4 H_p^T H_qp H_q).
inline double modified_h_se(const HamiltonianField& field, const PhaseState& z, double h, TruncationOrder order) {
    detail::require_se_order(order);
    if (order.value() == 0) {
        require_same_dim(field, z, "modified_h_se");
        return field.value(z);
    }
    const auto t = detail::se_terms(field, z, order.value() >= 2);
    double r = t.value + 0.5 * h * t.first;
    if (order.value() >= 2) r += h * h / 12.0 * (t.a + t.b + 4.0 * t.c);
    return r;
}

/// Inverse modified Hamiltonian of the same method:
///   H - (h/2) H_q^T H_p + (h^2/6)(H_q^T H_pp H_q + H_p^T H_qq H_p + H_p^T H_qp H_q).
inline double inverse_modified_h_se(const HamiltonianField& field, const PhaseState& z, double h,
                                    TruncationOrder order) {
    detail::require_se_order(order);
    if (order.value() == 0) {
        require_same_dim(field, z, "inverse_modified_h_se");
        return field.value(z);
    }
    const auto t = detail::se_terms(field, z, order.value() >= 2);
    double r = t.value - 0.5 * h * t.first;
    if (order.value() >= 2) r += h * h / 6.0 * (t.a + t.b + t.c);
    return r;
}

/// Implicit midpoint: H - (h^2/24) f^T Hess(H) f. Odd orders add nothing.
inline double modified_h_mp(const HamiltonianField& field, const PhaseState& z, double h, TruncationOrder order) {
    require_same_dim(field, z, "modified_h_mp");
    if (order.value() < 2) return field.value(z);
    return field.value(z) - h * h / 24.0 * detail::mp_term(field, z);
}

inline double inverse_modified_h_mp(const HamiltonianField& field, const PhaseState& z, double h,
                                    TruncationOrder order) {
    require_same_dim(field, z, "inverse_modified_h_mp");
    if (order.value() < 2) return field.value(z);
    return field.value(z) + h * h / 24.0 * detail::mp_term(field, z);
}

inline double modified_h(IntegratorTag tag, const HamiltonianField& field, const PhaseState& z, double h,
                         TruncationOrder order) {
    return tag == IntegratorTag::SymplecticEuler ? modified_h_se(field, z, h, order) : modified_h_mp(field, z, h, order);
}

inline double inverse_modified_h(IntegratorTag tag, const HamiltonianField& field, const PhaseState& z, double h,
                                 TruncationOrder order) {
    return tag == IntegratorTag::SymplecticEuler ? inverse_modified_h_se(field, z, h, order)
                                                 : inverse_modified_h_mp(field, z, h, order);
}

/// Highest truncation order available for a method.
inline int max_order(IntegratorTag tag) { return tag == IntegratorTag::SymplecticEuler ? 2 : 3; }

/// Modified Hamiltonian at every order 0..max_order(tag), sharing one
/// gradient/Hessian evaluation.
inline std::vector<double> modified_h_all_orders(IntegratorTag tag, const HamiltonianField& field, const PhaseState& z,
                                                 double h) {
    if (tag == IntegratorTag::SymplecticEuler) {
        const auto t = detail::se_terms(field, z, true);
        const double first = t.value + 0.5 * h * t.first;
        return {t.value, first, first + h * h / 12.0 * (t.a + t.b + 4.0 * t.c)};
    }
    require_same_dim(field, z, "modified_h_all_orders");
    const double v = field.value(z);
    const double second = v - h * h / 24.0 * detail::mp_term(field, z);
    return {v, v, second, second};
}

/// Identified Hamiltonian: the modified Hamiltonian of the learned Hbar at the
/// step size the model was trained with.
inline double identify_hamiltonian(const GpHamiltonianModel& model, const PhaseState& z, TruncationOrder order) {
    return modified_h(model.integrator(), as_field(model), z, model.h(), order);
}

inline std::vector<double> identify_all_orders(const GpHamiltonianModel& model, const PhaseState& z) {
    return modified_h_all_orders(model.integrator(), as_field(model), z, model.h());
}

/// Identified Hamiltonian restricted to p = 0.
inline double recover_potential(const GpHamiltonianModel& model, const Eigen::Ref<const Vector>& q,
                                TruncationOrder order) {
    if (2 * q.size() != model.nodes().rows())
        throw ContractViolation("recover_potential: configuration has wrong dimension");
    return identify_hamiltonian(model, PhaseState(Vector(q), Vector::Zero(q.size())), order);
}

/// Standard deviation of H - identified over the given points (uniform weights).
template <typename Identified>
double sigma_hdiff(const HamiltonianField& exact, const Identified& identified, std::span<const Vector> points) {
    if (points.empty()) throw DomainError("sigma_hdiff: empty mesh");
    std::vector<double> diff;
    diff.reserve(points.size());
    for (const auto& x : points) {
        const PhaseState z(x);
        diff.push_back(exact.value(z) - identified(z));
    }
    double mean = 0.0;
    for (double d : diff) mean += d;
    mean /= static_cast<double>(diff.size());
    // Corrected two-pass: the second sum removes the rounding bias of `mean`.
    double ss = 0.0, comp = 0.0;
    for (double d : diff) {
        ss += (d - mean) * (d - mean);
        comp += d - mean;
    }
    const double n = static_cast<double>(diff.size());
    return std::sqrt(std::max(0.0, (ss - comp * comp / n) / n));
}

template <typename Identified>
double sigma_hdiff(const HamiltonianField& exact, const Identified& identified, const MeshSpec& mesh) {
    const auto pts = uniform_mesh(mesh);
    return sigma_hdiff(exact, identified, std::span<const Vector>(pts));
}

/// Scalar function with derivatives from central differences. Used where a
/// truncated series must itself be differentiated.
class FiniteDifferenceField final : public HamiltonianField {
public:
    using Function = std::function<double(const PhaseState&)>;

    FiniteDifferenceField(Index n, Function f, double grad_step = 1e-4, double hess_step = 1e-3)
        : n_(n), f_(std::move(f)), gstep_(grad_step), hstep_(hess_step) {}

    Index dim() const override { return n_; }
    double value(const PhaseState& z) const override { return f_(z); }

    Vector gradient(const PhaseState& z) const override {
        Vector g(2 * n_);
        for (Index i = 0; i < 2 * n_; ++i) g(i) = (at(z, i, gstep_, -1, 0.0) - at(z, i, -gstep_, -1, 0.0)) / (2 * gstep_);
        return g;
    }

    Matrix hessian(const PhaseState& z) const override {
        const double d = hstep_;
        Matrix H(2 * n_, 2 * n_);
        for (Index i = 0; i < 2 * n_; ++i)
            for (Index j = i; j < 2 * n_; ++j) {
                const double v = (at(z, i, d, j, d) - at(z, i, d, j, -d) - at(z, i, -d, j, d) + at(z, i, -d, j, -d)) /
                                 (4 * d * d);
                H(i, j) = v;
                H(j, i) = v;
            }
        return H;
    }

private:
    double at(const PhaseState& z, Index i, double di, Index j, double dj) const {
        Vector w = z.coords();
        w(i) += di;
        if (j >= 0) w(j) += dj;
        return f_(PhaseState(std::move(w)));
    }

    Index n_;
    Function f_;
    double gstep_;
    double hstep_;
};

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("log_log_slope: need at least two pairs");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw DomainError("log_log_slope: values must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

/// Empirical order of the composition modified(inverse_modified(H)) - H at
/// truncation order 2. Expected ~3 for SE and ~4 for MP.
inline double bea_order_check(const HamiltonianField& field, std::span<const double> h_list, IntegratorTag tag,
                              std::span<const PhaseState> sample_points) {
    if (h_list.size() < 3) throw DomainError("bea_order_check: need at least 3 step sizes");
    if (sample_points.empty()) throw DomainError("bea_order_check: no sample points");
    const double ratio = h_list[0] / h_list[1];
    for (std::size_t k = 0; k + 1 < h_list.size(); ++k) {
        if (!(h_list[k] > 0) || !(h_list[k + 1] > 0)) throw DomainError("bea_order_check: step sizes must be positive");
        const double r = h_list[k] / h_list[k + 1];
        if (std::abs(r - 1.0) < 1e-3 || std::abs(r - ratio) > 1e-6 * std::abs(ratio))
            throw DomainError("bea_order_check: step sizes must form a geometric ladder");
    }
    const TruncationOrder two(2);
    std::vector<double> errs;
    for (double h : h_list) {
        FiniteDifferenceField inverse(field.dim(), [&, h](const PhaseState& z) {
            return inverse_modified_h(tag, field, z, h, two);
        });
        double worst = 0.0;
        for (const auto& z : sample_points)
            worst = std::max(worst, std::abs(modified_h(tag, inverse, z, h, two) - field.value(z)));
        errs.push_back(worst);
    }
    return log_log_slope(h_list, errs);
}

} // namespace ssi

#endif // SSI_BEA_HPP
