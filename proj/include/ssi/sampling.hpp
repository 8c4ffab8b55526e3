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

#ifndef SSI_SAMPLING_HPP
#define SSI_SAMPLING_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gp_model.hpp"
#include "integrators.hpp"
#include "phase_space.hpp"

namespace ssi {

/// Axis-aligned box with lower[i] < upper[i].
struct DomainBox {
    Vector lower;
    Vector upper;

    DomainBox() = default;
    DomainBox(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) { validate(); }

    void validate() const {
        if (lower.size() == 0 || lower.size() != upper.size())
            throw ContractViolation("DomainBox: lower and upper must be nonempty and of equal length");
        for (Index i = 0; i < lower.size(); ++i)
            if (!(lower(i) < upper(i)))
                throw ContractViolation("DomainBox: lower[" + std::to_string(i) + "] must be < upper");
    }

    Index dim() const noexcept { return lower.size(); }
    bool contains(const Eigen::Ref<const Vector>& x) const {
        return x.size() == dim() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
    }
    double diameter() const { return (upper - lower).norm(); }
};

/// Tensor grid with points_per_axis[i] >= 2 points along axis i, endpoints included.
struct MeshSpec {
    DomainBox box;
    std::vector<int> points_per_axis;

    void validate() const {
        box.validate();
        if (static_cast<Index>(points_per_axis.size()) != box.dim())
            throw ContractViolation("MeshSpec: points_per_axis length must match the box dimension");
        for (int c : points_per_axis)
            if (c < 2) throw ContractViolation("MeshSpec: each axis needs at least 2 points");
    }

    std::size_t count() const {
        std::size_t c = 1;
        for (int k : points_per_axis) c *= static_cast<std::size_t>(k);
        return c;
    }
};

/// Van der Corput radical inverse of `index` in `base`.
inline double radical_inverse(std::size_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

inline constexpr std::array<unsigned, 6> kHaltonBases{2, 3, 5, 7, 11, 13};

/// Points start_index, start_index+1, ... of the Halton sequence with prime
/// bases per axis, mapped affinely into `box`.
inline std::vector<Vector> halton_sequence(Index dim, std::size_t count, const DomainBox& box,
                                           std::size_t start_index = 1) {
    if (dim < 1 || dim > static_cast<Index>(kHaltonBases.size()))
        throw DomainError("halton_sequence: dimension must be in [1, 6]");
    if (count < 1) throw ContractViolation("halton_sequence: count must be >= 1");
    box.validate();
    if (box.dim() != dim) throw ContractViolation("halton_sequence: box dimension mismatch");
    std::vector<Vector> pts;
    pts.reserve(count);
    const Vector span = box.upper - box.lower;
    for (std::size_t k = 0; k < count; ++k) {
        Vector x(dim);
        for (Index a = 0; a < dim; ++a)
            x(a) = box.lower(a) + span(a) * radical_inverse(start_index + k, kHaltonBases[static_cast<std::size_t>(a)]);
        pts.push_back(std::move(x));
    }
    return pts;
}

inline std::vector<PhaseState> to_phase_states(const std::vector<Vector>& pts) {
    std::vector<PhaseState> out;
    out.reserve(pts.size());
    for (const auto& x : pts) out.emplace_back(x);
    return out;
}

/// Tensor-grid points, last axis varying fastest.
inline std::vector<Vector> uniform_mesh(const MeshSpec& spec) {
    spec.validate();
    const Index d = spec.box.dim();
    std::vector<Vector> pts;
    pts.reserve(spec.count());
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t c = 0; c < spec.count(); ++c) {
        Vector x(d);
        for (Index a = 0; a < d; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            const double t = static_cast<double>(idx[ua]) / (spec.points_per_axis[ua] - 1);
            x(a) = (idx[ua] == spec.points_per_axis[ua] - 1) ? spec.box.upper(a)
                                                             : spec.box.lower(a) + t * (spec.box.upper(a) - spec.box.lower(a));
        }
        pts.push_back(std::move(x));
        for (Index a = d - 1; a >= 0; --a) {
            const auto ua = static_cast<std::size_t>(a);
            if (++idx[ua] < spec.points_per_axis[ua]) break;
            idx[ua] = 0;
        }
    }
    return pts;
}

/// Pairs (y_j, phi_h(y_j)) with the flow approximated by reference_flow.
inline FlowDataset generate_flow_dataset(const HamiltonianField& field, const std::vector<PhaseState>& inputs, double h,
                                         int n_substeps) {
    FlowDataset data;
    data.h = h;
    data.inputs = inputs;
    data.outputs.reserve(inputs.size());
    for (const auto& y : inputs) data.outputs.push_back(reference_flow(field, y, h, n_substeps));
    data.validate();
    return data;
}

} // namespace ssi

#endif // SSI_SAMPLING_HPP
