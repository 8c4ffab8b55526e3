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

#ifndef SSI_PHASE_SPACE_HPP
#define SSI_PHASE_SPACE_HPP

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "errors.hpp"

namespace ssi {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point z = (q, p) of the 2n-dimensional phase space, stored as one
/// contiguous vector with the q block first.
class PhaseState {
public:
    PhaseState() = default;

    explicit PhaseState(Vector coords) : z_(std::move(coords)) {
        if (z_.size() < 2 || z_.size() % 2 != 0)
            throw ContractViolation("PhaseState: coordinate vector must have even length >= 2, got " +
                                    std::to_string(z_.size()));
        if (!z_.allFinite())
            throw ContractViolation("PhaseState: non-finite coordinate");
    }

    PhaseState(const Vector& q, const Vector& p) : PhaseState(concat(q, p)) {}

    static PhaseState zero(Index n) { return PhaseState(Vector::Zero(2 * n)); }

    /// Number of degrees of freedom n.
    Index dim() const noexcept { return z_.size() / 2; }

    auto q() const { return z_.head(dim()); }
    auto p() const { return z_.tail(dim()); }
    const Vector& coords() const noexcept { return z_; }

    friend bool operator==(const PhaseState& a, const PhaseState& b) {
        return a.z_.size() == b.z_.size() && a.z_ == b.z_;
    }

private:
    static Vector concat(const Vector& q, const Vector& p) {
        if (q.size() != p.size())
            throw ContractViolation("PhaseState: q and p have different lengths");
        Vector z(q.size() + p.size());
        z << q, p;
        return z;
    }

    Vector z_;
};

/// J = (0, -I; I, 0). Applied to (a, b) this gives (-b, a).
inline Vector apply_symplectic(const Eigen::Ref<const Vector>& v) {
    const Index n = v.size() / 2;
    Vector out(v.size());
    out.head(n) = -v.tail(n);
    out.tail(n) = v.head(n);
    return out;
}

/// J^{-1} = -J. Applied to a gradient (H_q, H_p) this gives (H_p, -H_q).
inline Vector apply_symplectic_inverse(const Eigen::Ref<const Vector>& v) {
    const Index n = v.size() / 2;
    Vector out(v.size());
    out.head(n) = v.tail(n);
    out.tail(n) = -v.head(n);
    return out;
}

inline Matrix symplectic_matrix(Index n) {
    Matrix J = Matrix::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = -Matrix::Identity(n, n);
    J.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
    return J;
}

/// Scalar Hamiltonian with closed-form derivatives. Gradients are ordered
/// (d/dq, d/dp); the Hessian uses the same ordering.
class HamiltonianField {
public:
    virtual ~HamiltonianField() = default;

    virtual Index dim() const = 0;
    virtual double value(const PhaseState& z) const = 0;
    virtual Vector gradient(const PhaseState& z) const = 0;
    virtual Matrix hessian(const PhaseState& z) const = 0;

    /// True when H = |p|^2 / 2 + V(q). Required by the Stormer-Verlet stepper.
    virtual bool is_separable() const { return false; }

    virtual std::string name() const { return "field"; }
};

inline void require_same_dim(const HamiltonianField& field, const PhaseState& z, const char* where) {
    if (field.dim() != z.dim())
        throw ContractViolation(std::string(where) + ": state has n=" + std::to_string(z.dim()) +
                                " but field has n=" + std::to_string(field.dim()));
}

/// Hamiltonian vector field J^{-1} grad H(z), returned as (qdot, pdot).
inline Vector hamiltonian_vector_field(const HamiltonianField& field, const PhaseState& z) {
    require_same_dim(field, z, "hamiltonian_vector_field");
    return apply_symplectic_inverse(field.gradient(z));
}

} // namespace ssi

#endif // SSI_PHASE_SPACE_HPP
