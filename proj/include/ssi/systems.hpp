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

#ifndef SSI_SYSTEMS_HPP
#define SSI_SYSTEMS_HPP

#include <cmath>

#include "phase_space.hpp"

namespace ssi {

/// Mathematical pendulum H = p^2/2 + (1 - cos q).
class PendulumSystem final : public HamiltonianField {
public:
    Index dim() const override { return 1; }

    double value(const PhaseState& z) const override {
        require_same_dim(*this, z, "PendulumSystem::value");
        const double q = z.q()(0), p = z.p()(0);
        return 0.5 * p * p + (1.0 - std::cos(q));
    }

    Vector gradient(const PhaseState& z) const override {
        require_same_dim(*this, z, "PendulumSystem::gradient");
        return Eigen::Vector2d(std::sin(z.q()(0)), z.p()(0));
    }

    Matrix hessian(const PhaseState& z) const override {
        require_same_dim(*this, z, "PendulumSystem::hessian");
        Matrix H = Matrix::Zero(2, 2);
        H(0, 0) = std::cos(z.q()(0));
        H(1, 1) = 1.0;
        return H;
    }

    bool is_separable() const override { return true; }
    std::string name() const override { return "pendulum"; }
};

/// Upper end of the energy interval [0, 1/(6 mu^2)) with bounded level sets.
inline double henon_heiles_critical_energy(double mu) {
    if (mu == 0.0 || !std::isfinite(mu))
        throw DomainError("henon_heiles_critical_energy: mu must be finite and nonzero");
    return 1.0 / (6.0 * mu * mu);
}

/// H = |p|^2/2 + |q|^2/2 + mu (q1^2 q2 - q2^3 / 3).
class HenonHeilesSystem final : public HamiltonianField {
public:
    explicit HenonHeilesSystem(double mu) : mu_(mu) {
        if (!std::isfinite(mu)) throw ContractViolation("HenonHeilesSystem: mu must be finite");
    }

    double mu() const noexcept { return mu_; }
    Index dim() const override { return 2; }

    double potential(double q1, double q2) const {
        return 0.5 * (q1 * q1 + q2 * q2) + mu_ * (q1 * q1 * q2 - q2 * q2 * q2 / 3.0);
    }

    double value(const PhaseState& z) const override {
        require_same_dim(*this, z, "HenonHeilesSystem::value");
        return 0.5 * z.p().squaredNorm() + potential(z.q()(0), z.q()(1));
    }

    Vector gradient(const PhaseState& z) const override {
        require_same_dim(*this, z, "HenonHeilesSystem::gradient");
        const double q1 = z.q()(0), q2 = z.q()(1);
        Vector g(4);
        g << q1 + 2.0 * mu_ * q1 * q2, q2 + mu_ * (q1 * q1 - q2 * q2), z.p()(0), z.p()(1);
        return g;
    }

    Matrix hessian(const PhaseState& z) const override {
        require_same_dim(*this, z, "HenonHeilesSystem::hessian");
        const double q1 = z.q()(0), q2 = z.q()(1);
        Matrix H = Matrix::Zero(4, 4);
        H(0, 0) = 1.0 + 2.0 * mu_ * q2;
        H(0, 1) = H(1, 0) = 2.0 * mu_ * q1;
        H(1, 1) = 1.0 - 2.0 * mu_ * q2;
        H(2, 2) = H(3, 3) = 1.0;
        return H;
    }

    bool is_separable() const override { return true; }
    std::string name() const override { return "henon_heiles"; }

private:
    double mu_;
};

/// Isotropic harmonic oscillator H = (|q|^2 + |p|^2) / 2 in n degrees of freedom.
class HarmonicOscillator final : public HamiltonianField {
public:
    explicit HarmonicOscillator(Index n = 1) : n_(n) {
        if (n < 1) throw ContractViolation("HarmonicOscillator: n must be >= 1");
    }

    Index dim() const override { return n_; }

    double value(const PhaseState& z) const override {
        require_same_dim(*this, z, "HarmonicOscillator::value");
        return 0.5 * z.coords().squaredNorm();
    }
    Vector gradient(const PhaseState& z) const override {
        require_same_dim(*this, z, "HarmonicOscillator::gradient");
        return z.coords();
    }
    Matrix hessian(const PhaseState& z) const override {
        require_same_dim(*this, z, "HarmonicOscillator::hessian");
        return Matrix::Identity(2 * n_, 2 * n_);
    }

    bool is_separable() const override { return true; }
    std::string name() const override { return "harmonic"; }

private:
    Index n_;
};

} // namespace ssi

#endif // SSI_SYSTEMS_HPP
