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

#ifndef SSI_TESTS_SUPPORT_HPP
#define SSI_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include <ssi/ssi.hpp>

namespace ssi::testing {

// Seeded generators for property tests. Each test constructs its own so
// results never depend on execution order.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    Vector in_box(const DomainBox& box) {
        Vector v(box.dim());
        for (Index i = 0; i < box.dim(); ++i) v(i) = uniform(box.lower(i), box.upper(i));
        return v;
    }

    PhaseState state(const DomainBox& box) { return PhaseState(in_box(box)); }

    Vector unit_vector(Index size) {
        Vector v(size);
        for (Index i = 0; i < size; ++i) v(i) = std::normal_distribution<double>()(rng_);
        return v / v.norm();
    }

private:
    std::mt19937_64 rng_;
};

inline DomainBox pendulum_box() {
    return DomainBox(Eigen::Vector2d(-2 * M_PI, -1.2), Eigen::Vector2d(2 * M_PI, 1.2));
}

inline DomainBox hh_box() { return DomainBox(Vector::Constant(4, -1.0), Vector::Constant(4, 1.0)); }

inline DomainBox box_around(Index n, double half_width) {
    return DomainBox(Vector::Constant(2 * n, -half_width), Vector::Constant(2 * n, half_width));
}

inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double step) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vector a = x, b = x;
        a(i) += step;
        b(i) -= step;
        g(i) = (f(a) - f(b)) / (2 * step);
    }
    return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double step) {
    const Index m = f(x).size();
    Matrix J(m, x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vector a = x, b = x;
        a(i) += step;
        b(i) -= step;
        J.col(i) = (f(a) - f(b)) / (2 * step);
    }
    return J;
}

// Fourth-order stencils. Used on trained GP models, whose evaluations carry
// rounding noise that rules out the small steps central differences need.
inline Vector fd_gradient5(const std::function<double(const Vector&)>& f, const Vector& x, double step) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const auto at = [&](double d) {
            Vector a = x;
            a(i) += d;
            return f(a);
        };
        g(i) = (-at(2 * step) + 8 * at(step) - 8 * at(-step) + at(-2 * step)) / (12 * step);
    }
    return g;
}

inline Matrix fd_jacobian5(const std::function<Vector(const Vector&)>& f, const Vector& x, double step) {
    const Index m = f(x).size();
    Matrix J(m, x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const auto at = [&](double d) {
            Vector a = x;
            a(i) += d;
            return Vector(f(a));
        };
        J.col(i) = (-at(2 * step) + 8 * at(step) - 8 * at(-step) + at(-2 * step)) / (12 * step);
    }
    return J;
}

inline double symplecticity_defect(const Matrix& psi) {
    const Matrix J = symplectic_matrix(psi.rows() / 2);
    return (psi.transpose() * J * psi - J).lpNorm<Eigen::Infinity>();
}

inline double rel_err(double a, double b, double floor = 1e-12) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double rel_err(const Matrix& a, const Matrix& b, double floor = 1e-12) {
    return (a - b).lpNorm<Eigen::Infinity>() / std::max({a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>(), floor});
}

// Pendulum models at the reference protocol (h=0.3, 800 sub-steps, k_c=1, e=2,
// sigma=1e-13), cached per (N, tag) because training is the expensive part.
struct TrainedPendulum {
    FlowDataset data;
    std::unique_ptr<GpHamiltonianModel> model;
};

inline const TrainedPendulum& trained_pendulum(std::size_t N, IntegratorTag tag) {
    static std::map<std::pair<std::size_t, int>, TrainedPendulum> cache;
    const auto key = std::make_pair(N, static_cast<int>(tag));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const PendulumSystem pendulum;
    TrainedPendulum t;
    const auto Y = to_phase_states(halton_sequence(2, N, pendulum_box()));
    t.data = generate_flow_dataset(pendulum, Y, 0.3, 800);
    t.model = std::make_unique<GpHamiltonianModel>(
        train(t.data, Y, KernelParams{1.0, 2.0}, 1e-13, tag, Normalization{Y[0], pendulum.value(Y[0])}));
    return cache.emplace(key, std::move(t)).first->second;
}

} // namespace ssi::testing

#endif // SSI_TESTS_SUPPORT_HPP
