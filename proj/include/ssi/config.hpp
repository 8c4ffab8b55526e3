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

#ifndef SSI_CONFIG_HPP
#define SSI_CONFIG_HPP

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"
#include "kernels.hpp"
#include "sampling.hpp"
#include "systems.hpp"

namespace ssi {

struct SystemSpec {
    std::string type = "pendulum"; ///< "pendulum" | "henon_heiles"
    double mu = 0.8;               ///< Henon-Heiles coupling
};

/// Chooses y0 either as a training-input index or as an explicit point. With
/// `use_exact` the target value is the exact H(y0) instead of `value`.
struct NormalizationSpec {
    std::size_t index = 0;
    std::optional<Vector> point;
    double value = 0.0;
    bool use_exact = false;
};

/// Everything needed to reproduce one experiment. All sampling is deterministic.
struct ExperimentConfig {
    std::string name = "experiment";
    SystemSpec system;
    DomainBox domain;
    std::size_t N = 160;
    std::size_t halton_start = 1;
    double h = 0.3;
    int n_substeps = 800;
    KernelParams kernel{1.0, 2.0};
    double sigma = 1e-13;
    IntegratorTag integrator = IntegratorTag::SymplecticEuler;
    NormalizationSpec normalization;
    std::optional<std::string> nodes_file; ///< CSV with q/p columns; defaults to Z = Y
    Vector z0;
    std::size_t steps = 1000;
    std::vector<int> mesh_points;          ///< identification mesh over `domain`
    std::vector<int> potential_mesh;       ///< q-mesh for potential recovery (empty: skip)
    ImplicitSolveOptions solver;
    std::size_t direct_step_divisor = 1;   ///< baseline-direct uses h / divisor
    std::optional<std::size_t> direct_steps;
    std::optional<std::size_t> flowmap_steps;
    std::size_t output_stride = 1;         ///< keep every k-th state in trajectory files
    double escape_threshold = 10.0;        ///< |z|_inf beyond this counts as escaped

    Index dof() const { return domain.dim() / 2; }

    MeshSpec mesh() const { return MeshSpec{domain, mesh_points}; }

    void validate() const {
        domain.validate();
        if (domain.dim() % 2 != 0) throw ContractViolation("config: domain must have even dimension");
        if (system.type != "pendulum" && system.type != "henon_heiles")
            throw ContractViolation("config: unknown system '" + system.type + "'");
        const Index n = system.type == "pendulum" ? 1 : 2;
        if (dof() != n) throw ContractViolation("config: domain dimension does not match the system");
        if (N < 1) throw ContractViolation("config: N must be >= 1");
        if (!(h > 0.0)) throw ContractViolation("config: h must be positive");
        if (n_substeps < 1) throw ContractViolation("config: n_substeps must be >= 1");
        kernel.validate();
        if (!(sigma >= 0.0)) throw ContractViolation("config: sigma must be >= 0");
        if (z0.size() != 2 * n) throw ContractViolation("config: z0 has wrong length");
        if (normalization.point && normalization.point->size() != 2 * n)
            throw ContractViolation("config: normalization point has wrong length");
        if (normalization.index >= N) throw ContractViolation("config: normalization index out of range");
        if (!mesh_points.empty()) mesh().validate();
        if (!potential_mesh.empty() && static_cast<Index>(potential_mesh.size()) != n)
            throw ContractViolation("config: potential_mesh needs one entry per configuration axis");
        solver.validate();
        if (direct_step_divisor < 1) throw ContractViolation("config: direct_step_divisor must be >= 1");
        if (output_stride < 1) throw ContractViolation("config: output_stride must be >= 1");
    }
};

inline std::unique_ptr<HamiltonianField> make_system(const SystemSpec& spec) {
    if (spec.type == "pendulum") return std::make_unique<PendulumSystem>();
    if (spec.type == "henon_heiles") return std::make_unique<HenonHeilesSystem>(spec.mu);
    throw ContractViolation("unknown system '" + spec.type + "'");
}

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["system"] = {{"type", c.system.type}};
    if (c.system.type == "henon_heiles") j["system"]["mu"] = c.system.mu;
    j["domain"] = {{"lower", vector_to_json(c.domain.lower)}, {"upper", vector_to_json(c.domain.upper)}};
    j["N"] = c.N;
    j["halton_start"] = c.halton_start;
    j["h"] = c.h;
    j["n_substeps"] = c.n_substeps;
    j["kernel"] = {{"k_c", c.kernel.k_c}, {"e", c.kernel.e}};
    j["sigma"] = c.sigma;
    j["integrator"] = to_string(c.integrator);
    json norm = {{"index", c.normalization.index}, {"value", c.normalization.value},
                 {"use_exact", c.normalization.use_exact}};
    if (c.normalization.point) norm["point"] = vector_to_json(*c.normalization.point);
    j["normalization"] = norm;
    if (c.nodes_file) j["nodes_file"] = *c.nodes_file;
    j["z0"] = vector_to_json(c.z0);
    j["steps"] = c.steps;
    j["mesh_points"] = c.mesh_points;
    j["potential_mesh"] = c.potential_mesh;
    j["solver"] = {{"tolerance", c.solver.tolerance},
                   {"max_iterations", c.solver.max_iterations},
                   {"strategy", c.solver.strategy == SolveStrategy::FixedPoint ? "fixed_point" : "newton_fallback"},
                   {"stagnation_tolerance", c.solver.stagnation_tolerance},
                   {"polish_iterations", c.solver.polish_iterations}};
    j["direct_step_divisor"] = c.direct_step_divisor;
    if (c.direct_steps) j["direct_steps"] = *c.direct_steps;
    if (c.flowmap_steps) j["flowmap_steps"] = *c.flowmap_steps;
    j["output_stride"] = c.output_stride;
    j["escape_threshold"] = c.escape_threshold;
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        c.name = j.value("name", c.name);
        const json& sys = j.at("system");
        c.system.type = sys.at("type").get<std::string>();
        c.system.mu = sys.value("mu", c.system.mu);
        c.domain = DomainBox(vector_from_json(j.at("domain").at("lower")), vector_from_json(j.at("domain").at("upper")));
        c.N = j.value("N", c.N);
        c.halton_start = j.value("halton_start", c.halton_start);
        c.h = j.value("h", c.h);
        c.n_substeps = j.value("n_substeps", c.n_substeps);
        if (j.contains("kernel")) c.kernel = {j["kernel"].at("k_c").get<double>(), j["kernel"].at("e").get<double>()};
        c.sigma = j.value("sigma", c.sigma);
        if (j.contains("integrator")) c.integrator = integrator_tag_from_string(j["integrator"].get<std::string>());
        if (j.contains("normalization")) {
            const json& n = j["normalization"];
            c.normalization.index = n.value("index", std::size_t{0});
            c.normalization.value = n.value("value", 0.0);
            c.normalization.use_exact = n.value("use_exact", false);
            if (n.contains("point")) c.normalization.point = vector_from_json(n["point"]);
        }
        if (j.contains("nodes_file")) c.nodes_file = j["nodes_file"].get<std::string>();
        c.z0 = vector_from_json(j.at("z0"));
        c.steps = j.value("steps", c.steps);
        c.mesh_points = j.value("mesh_points", std::vector<int>{});
        c.potential_mesh = j.value("potential_mesh", std::vector<int>{});
        if (j.contains("solver")) {
            const json& s = j["solver"];
            c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
            c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
            c.solver.stagnation_tolerance = s.value("stagnation_tolerance", c.solver.stagnation_tolerance);
            c.solver.polish_iterations = s.value("polish_iterations", c.solver.polish_iterations);
            const std::string strategy = s.value("strategy", std::string("newton_fallback"));
            if (strategy == "fixed_point") c.solver.strategy = SolveStrategy::FixedPoint;
            else if (strategy == "newton_fallback") c.solver.strategy = SolveStrategy::NewtonFallback;
            else throw ContractViolation("config: unknown solver strategy '" + strategy + "'");
        }
        c.direct_step_divisor = j.value("direct_step_divisor", c.direct_step_divisor);
        if (j.contains("direct_steps")) c.direct_steps = j["direct_steps"].get<std::size_t>();
        if (j.contains("flowmap_steps")) c.flowmap_steps = j["flowmap_steps"].get<std::size_t>();
        c.output_stride = j.value("output_stride", c.output_stride);
        c.escape_threshold = j.value("escape_threshold", c.escape_threshold);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what(), 0, 0);
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

} // namespace ssi

#endif // SSI_CONFIG_HPP
