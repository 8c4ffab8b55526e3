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

#ifndef SSI_INTEGRATORS_HPP
#define SSI_INTEGRATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "phase_space.hpp"

namespace ssi {

enum class SolveStrategy { FixedPoint, NewtonFallback };

/// Controls the implicit solves inside Symplectic Euler and implicit midpoint.
/// Convergence is judged on the infinity norm of the defining-equation residual.
struct ImplicitSolveOptions {
    double tolerance = 1e-12;
    int max_iterations = 50;
    SolveStrategy strategy = SolveStrategy::NewtonFallback;
    /// A solve that cannot reduce the residual further (rounding floor of the
    /// field evaluation) is accepted if its residual is below this bound.
    /// Zero disables the fallback.
    double stagnation_tolerance = 0.0;
    /// Extra fixed-point sweeps after the tolerance is met, kept only while each
    /// at least halves the residual. Drives analytic fields to rounding level.
    int polish_iterations = 3;

    void validate() const {
        if (!(tolerance > 0.0)) throw ContractViolation("ImplicitSolveOptions: tolerance must be positive");
        if (max_iterations < 1) throw ContractViolation("ImplicitSolveOptions: max_iterations must be >= 1");
        if (!(stagnation_tolerance >= 0.0))
            throw ContractViolation("ImplicitSolveOptions: stagnation_tolerance must be >= 0");
        if (polish_iterations < 0) throw ContractViolation("ImplicitSolveOptions: polish_iterations must be >= 0");
    }

    double accepted_residual() const { return std::max(tolerance, stagnation_tolerance); }
};

enum class Method { SymplecticEuler, ImplicitMidpoint, StormerVerlet };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::SymplecticEuler: return "symplectic_euler";
    case Method::ImplicitMidpoint: return "implicit_midpoint";
    case Method::StormerVerlet: return "stormer_verlet";
    }
    return "unknown";
}

namespace detail {

// Solves x = map(x). Fixed-point sweeps first; if the residual stops halving and
// the strategy allows it, switches to damped Newton with Jacobian I - dmap/dx.
template <typename Map, typename MapJacobian>
Vector solve_fixed_point(Vector x, const Map& map, const MapJacobian& map_jacobian,
                         const ImplicitSolveOptions& opts, const char* where) {
    opts.validate();
    Vector fx = map(x);
    double res = (x - fx).lpNorm<Eigen::Infinity>();
    int it = 0;
    bool newton = false;
    while (res > opts.tolerance && it < opts.max_iterations) {
        ++it;
        if (!newton) {
            x = fx;
            fx = map(x);
            const double next = (x - fx).lpNorm<Eigen::Infinity>();
            if (opts.strategy == SolveStrategy::NewtonFallback && next > 0.5 * res) newton = true;
            res = next;
            continue;
        }
        const Vector g = x - fx;
        Matrix Jg = -map_jacobian(x);
        Jg.diagonal().array() += 1.0;
        const Vector dx = Jg.partialPivLu().solve(g);
        double lambda = 1.0;
        Vector trial = x - dx;
        Vector ftrial = map(trial);
        double tres = (trial - ftrial).lpNorm<Eigen::Infinity>();
        // Inside the stagnation bound a failed full step means the rounding floor
        // has been reached; halving further only burns evaluations.
        const int max_halvings = res <= opts.stagnation_tolerance ? 0 : 12;
        for (int k = 0; k < max_halvings && !(tres < res); ++k) {
            lambda *= 0.5;
            trial = x - lambda * dx;
            ftrial = map(trial);
            tres = (trial - ftrial).lpNorm<Eigen::Infinity>();
        }
        if (!(tres < res)) break; // no further decrease possible
        x = std::move(trial);
        fx = std::move(ftrial);
        res = tres;
    }
    if (res <= opts.tolerance) {
        const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x.lpNorm<Eigen::Infinity>());
        for (int k = 0; k < opts.polish_iterations && res > floor; ++k) {
            Vector trial = fx;
            Vector ftrial = map(trial);
            const double tres = (trial - ftrial).lpNorm<Eigen::Infinity>();
            if (!(tres <= 0.5 * res)) break;
            x = std::move(trial);
            fx = std::move(ftrial);
            res = tres;
        }
    }
    if (!(res <= opts.accepted_residual()) || !x.allFinite())
        throw ConvergenceError(std::string(where) + ": implicit solve did not converge (residual " +
                                   sci(res) + " after " + std::to_string(it) + " iterations)",
                               res, it);
    return x;
}

} // namespace detail

/// Symplectic Euler with implicit position update:
///   qbar = q + h H_p(qbar, p),  pbar = p - h H_q(qbar, p).
inline PhaseState symplectic_euler_step(const HamiltonianField& field, const PhaseState& z, double h,
                                        const ImplicitSolveOptions& opts = {}) {
    require_same_dim(field, z, "symplectic_euler_step");
    if (h == 0.0) return z;
    const Index n = z.dim();
    const Vector q = z.q(), p = z.p();
    Vector w(2 * n);
    w.tail(n) = p;
    auto map = [&](const Vector& qbar) -> Vector {
        w.head(n) = qbar;
        return q + h * field.gradient(PhaseState(w)).tail(n);
    };
    auto map_jacobian = [&](const Vector& qbar) -> Matrix {
        w.head(n) = qbar;
        return h * field.hessian(PhaseState(w)).bottomLeftCorner(n, n);
    };
    const Vector g0 = field.gradient(z);
    const Vector qbar = detail::solve_fixed_point(q + h * g0.tail(n), map, map_jacobian, opts, "symplectic_euler_step");
    w.head(n) = qbar;
    const Vector g = field.gradient(PhaseState(w));
    Vector out(2 * n);
    out << qbar, p - h * g.head(n);
    return PhaseState(std::move(out));
}

/// Implicit midpoint rule zbar = z + h J^{-1} grad H((z + zbar) / 2).
inline PhaseState implicit_midpoint_step(const HamiltonianField& field, const PhaseState& z, double h,
                                         const ImplicitSolveOptions& opts = {}) {
    require_same_dim(field, z, "implicit_midpoint_step");
    if (h == 0.0) return z;
    const Vector& z0 = z.coords();
    auto map = [&](const Vector& zbar) -> Vector {
        return z0 + h * apply_symplectic_inverse(field.gradient(PhaseState(Vector(0.5 * (zbar + z0)))));
    };
    auto map_jacobian = [&](const Vector& zbar) -> Matrix {
        const Matrix H = field.hessian(PhaseState(Vector(0.5 * (zbar + z0))));
        const Index n = z.dim();
        Matrix out(2 * n, 2 * n);
        out.topRows(n) = H.bottomRows(n);
        out.bottomRows(n) = -H.topRows(n);
        return 0.5 * h * out;
    };
    Vector guess = z0 + h * apply_symplectic_inverse(field.gradient(z));
    return PhaseState(detail::solve_fixed_point(std::move(guess), map, map_jacobian, opts, "implicit_midpoint_step"));
}

/// Residual infinity norms of the defining equations, for independent checks.
inline double symplectic_euler_residual(const HamiltonianField& field, const PhaseState& z, const PhaseState& zbar,
                                        double h) {
    const Index n = z.dim();
    Vector w(2 * n);
    w << zbar.q(), z.p();
    const Vector g = field.gradient(PhaseState(w));
    Vector r(2 * n);
    r.head(n) = zbar.q() - z.q() - h * g.tail(n);
    r.tail(n) = zbar.p() - z.p() + h * g.head(n);
    return r.lpNorm<Eigen::Infinity>();
}

inline double implicit_midpoint_residual(const HamiltonianField& field, const PhaseState& z, const PhaseState& zbar,
                                         double h) {
    const Vector m = 0.5 * (z.coords() + zbar.coords());
    return (zbar.coords() - z.coords() - h * apply_symplectic_inverse(field.gradient(PhaseState(m))))
        .lpNorm<Eigen::Infinity>();
}

inline void require_separable(const HamiltonianField& field, const char* where) {
    if (!field.is_separable())
        throw ContractViolation(std::string(where) + ": field is not separable with unit mass");
}

/// Stormer-Verlet (velocity form) for H = |p|^2/2 + V(q).
inline PhaseState stormer_verlet_step(const HamiltonianField& field, const PhaseState& z, double h) {
    require_separable(field, "stormer_verlet_step");
    require_same_dim(field, z, "stormer_verlet_step");
    const Index n = z.dim();
    Vector w = z.coords();
    const Vector p_half = z.p() - 0.5 * h * field.gradient(z).head(n);
    w.head(n) += h * p_half;
    w.tail(n) = p_half;
    const Vector grad_v = field.gradient(PhaseState(w)).head(n);
    w.tail(n) = p_half - 0.5 * h * grad_v;
    return PhaseState(std::move(w));
}

/// High-accuracy approximation of the exact time-h flow by n_substeps
/// Stormer-Verlet steps of size h / n_substeps.
inline PhaseState reference_flow(const HamiltonianField& field, const PhaseState& z, double h, int n_substeps) {
    require_separable(field, "reference_flow");
    require_same_dim(field, z, "reference_flow");
    if (n_substeps < 1) throw ContractViolation("reference_flow: n_substeps must be >= 1");
    const Index n = z.dim();
    const double dt = h / n_substeps;
    Vector w = z.coords();
    Vector grad_v = field.gradient(z).head(n);
    for (int s = 0; s < n_substeps; ++s) {
        w.tail(n) -= 0.5 * dt * grad_v;
        w.head(n) += dt * w.tail(n);
        grad_v = field.gradient(PhaseState(w)).head(n);
        w.tail(n) -= 0.5 * dt * grad_v;
    }
    return PhaseState(std::move(w));
}

inline PhaseState step(const HamiltonianField& field, const PhaseState& z, double h, Method method,
                       const ImplicitSolveOptions& opts = {}) {
    switch (method) {
    case Method::SymplecticEuler: return symplectic_euler_step(field, z, h, opts);
    case Method::ImplicitMidpoint: return implicit_midpoint_step(field, z, h, opts);
    case Method::StormerVerlet: return stormer_verlet_step(field, z, h);
    }
    throw ContractViolation("step: unknown method");
}

/// Time-ordered states z_k at t0 + k h.
struct TrajectoryRecord {
    std::vector<PhaseState> states;
    double h = 0.0;
    double t0 = 0.0;
    std::string method_tag;
    std::string field_tag;
    bool stopped_early = false;

    std::size_t size() const noexcept { return states.size(); }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * h; }
    Index dim() const { return states.empty() ? 0 : states.front().dim(); }
};

using StopPredicate = std::function<bool(const PhaseState&)>;

/// Streams `steps` steps of `method` from z0 to `visit(k, z_k)`, starting with
/// k = 0. Stops early when `visit` returns false. Returns the number of steps
/// taken. Step failures are rethrown as StepError carrying the step index.
template <typename Visitor>
std::size_t integrate_streaming(const HamiltonianField& field, const PhaseState& z0, double h, std::size_t steps,
                                Method method, const ImplicitSolveOptions& opts, Visitor&& visit) {
    require_same_dim(field, z0, "integrate");
    PhaseState z = z0;
    if (!visit(std::size_t{0}, z)) return 0;
    for (std::size_t k = 0; k < steps; ++k) {
        try {
            z = step(field, z, h, method, opts);
        } catch (const NumericalError& e) {
            throw StepError("integrate: step " + std::to_string(k) + " failed: " + e.what(), k);
        } catch (const ContractViolation& e) {
            // Non-finite states surface as contract violations of PhaseState.
            throw StepError("integrate: step " + std::to_string(k) + " failed: " + e.what(), k);
        }
        if (!visit(k + 1, z)) return k + 1;
    }
    return steps;
}

/// Runs `steps` steps of `method` from z0. If `stop_when` is given and returns
/// true for a new state, that state is recorded and integration stops early.
inline TrajectoryRecord integrate(const HamiltonianField& field, const PhaseState& z0, double h, std::size_t steps,
                                  Method method, const ImplicitSolveOptions& opts = {},
                                  const StopPredicate& stop_when = {}) {
    TrajectoryRecord rec;
    rec.h = h;
    rec.method_tag = to_string(method);
    rec.field_tag = field.name();
    rec.states.reserve(steps + 1);
    integrate_streaming(field, z0, h, steps, method, opts, [&](std::size_t k, const PhaseState& z) {
        rec.states.push_back(z);
        if (k > 0 && stop_when && stop_when(z)) {
            rec.stopped_early = true;
            return false;
        }
        return true;
    });
    return rec;
}

} // namespace ssi

#endif // SSI_INTEGRATORS_HPP
