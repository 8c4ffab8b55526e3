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

#ifndef SSI_EXPERIMENT_HPP
#define SSI_EXPERIMENT_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "bea.hpp"
#include "config.hpp"
#include "flowmap_baseline.hpp"
#include "gp_model.hpp"
#include "integrators.hpp"
#include "io.hpp"
#include "sampling.hpp"

// End-to-end pipelines shared by the command-line tool and the acceptance suite.
namespace ssi::experiment {

inline std::vector<PhaseState> training_inputs(const ExperimentConfig& cfg) {
    return to_phase_states(halton_sequence(cfg.domain.dim(), cfg.N, cfg.domain, cfg.halton_start));
}

inline FlowDataset generate_data(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto system = make_system(cfg.system);
    return generate_flow_dataset(*system, training_inputs(cfg), cfg.h, cfg.n_substeps);
}

inline Normalization resolve_normalization(const ExperimentConfig& cfg, const FlowDataset& data) {
    const auto& spec = cfg.normalization;
    if (!spec.point && spec.index >= data.size()) throw ContractViolation("normalization index out of range");
    PhaseState y0 = spec.point ? PhaseState(*spec.point) : data.inputs[spec.index];
    double value = spec.value;
    if (spec.use_exact) value = make_system(cfg.system)->value(y0);
    return {std::move(y0), value};
}

inline std::vector<PhaseState> resolve_nodes(const ExperimentConfig& cfg, const FlowDataset& data) {
    if (!cfg.nodes_file) return data.inputs;
    auto is = open_input(*cfg.nodes_file);
    const CsvTable t = read_csv(is);
    const Index n = detail::count_dof(t, "q");
    std::vector<PhaseState> nodes;
    for (std::size_t r = 0; r < t.rows.size(); ++r) nodes.push_back(detail::row_state(t, t.rows[r], n, "q", "p", r + 2));
    if (nodes.empty()) throw ParseError("nodes file has no rows", 2, 1);
    return nodes;
}

inline GpHamiltonianModel train_model(const ExperimentConfig& cfg, const FlowDataset& data) {
    if (data.dim() != cfg.dof()) throw ContractViolation("dataset dimension does not match the config");
    const auto nodes = resolve_nodes(cfg, data);
    return train(data, nodes, cfg.kernel, cfg.sigma, cfg.integrator, resolve_normalization(cfg, data));
}

inline Method method_for(IntegratorTag tag) {
    return tag == IntegratorTag::SymplecticEuler ? Method::SymplecticEuler : Method::ImplicitMidpoint;
}

/// Result of a long run: the strided record for files plus statistics of the
/// exact energy over every step.
struct TrajectoryRun {
    TrajectoryRecord record;
    std::vector<NamedColumn> columns; ///< energies at the recorded states
    SeriesStats energy;               ///< observer energy over all steps
    std::size_t steps_taken = 0;
    bool escaped = false;
    double escape_time = 0.0;
};

struct RunOptions {
    std::size_t stride = 1;
    double escape_threshold = 10.0;
};

/// Streams a trajectory generated by `advance`, tracking `observer` (the exact
/// H when known) and optionally a second field (the learned Hbar).
template <typename Advance>
TrajectoryRun run_generic(const PhaseState& z0, double h, const HamiltonianField& observer,
                          const HamiltonianField* secondary, const std::string& secondary_name, const RunOptions& opts,
                          Advance&& advance) {
    TrajectoryRun run;
    run.record.h = h * static_cast<double>(opts.stride);
    NamedColumn energy{"H", {}};
    NamedColumn second{secondary_name, {}};
    auto visit = [&](std::size_t k, const PhaseState& s) {
        const double e = observer.value(s);
        run.energy.add(static_cast<double>(k) * h, e);
        const bool escaped = k > 0 && s.coords().lpNorm<Eigen::Infinity>() > opts.escape_threshold;
        if (k % opts.stride == 0 || escaped) {
            run.record.states.push_back(s);
            energy.values.push_back(e);
            if (secondary) second.values.push_back(secondary->value(s));
        }
        run.steps_taken = k;
        if (escaped) {
            run.escaped = true;
            run.escape_time = static_cast<double>(k) * h;
            return false;
        }
        return true;
    };
    advance(z0, visit);
    run.columns.push_back(std::move(energy));
    if (secondary) run.columns.push_back(std::move(second));
    return run;
}

inline TrajectoryRun run_integrator(const HamiltonianField& field, const PhaseState& z0, double h, std::size_t steps,
                                    Method method, const ImplicitSolveOptions& solver, const HamiltonianField& observer,
                                    const RunOptions& opts, bool record_field_value) {
    auto run = run_generic(z0, h, observer, record_field_value ? &field : nullptr, "Hbar", opts,
                           [&](const PhaseState& start, auto& visit) {
                               integrate_streaming(field, start, h, steps, method, solver, visit);
                           });
    run.record.method_tag = to_string(method);
    run.record.field_tag = field.name();
    return run;
}

/// SSI prediction: integrate the learned Hbar with the method it was trained for.
inline TrajectoryRun predict(const GpHamiltonianModel& model, const PhaseState& z0, std::size_t steps,
                             const ImplicitSolveOptions& solver, const HamiltonianField* exact, const RunOptions& opts) {
    const GpField field = as_field(model);
    const HamiltonianField& observer = exact ? *exact : static_cast<const HamiltonianField&>(field);
    return run_integrator(field, z0, model.h(), steps, method_for(model.integrator()), solver, observer, opts,
                          exact != nullptr);
}

inline std::size_t direct_steps(const ExperimentConfig& cfg) {
    return cfg.direct_steps ? *cfg.direct_steps : cfg.steps * cfg.direct_step_divisor;
}

/// Strategy-2 reference: the same method applied to the exact Hamiltonian at h / divisor.
inline TrajectoryRun baseline_direct(const ExperimentConfig& cfg, std::optional<std::size_t> steps = {},
                                     std::optional<Vector> z0 = {}) {
    const auto system = make_system(cfg.system);
    const double h = cfg.h / static_cast<double>(cfg.direct_step_divisor);
    ImplicitSolveOptions solver = cfg.solver;
    return run_integrator(*system, PhaseState(z0 ? *z0 : cfg.z0), h, steps ? *steps : direct_steps(cfg),
                          method_for(cfg.integrator), solver, *system,
                          RunOptions{cfg.output_stride, cfg.escape_threshold}, false);
}

struct FlowMapRun {
    FlowMapGpModel model;
    TrajectoryRun run;
    double max_training_error = 0.0; ///< max |predict(y_j) - ybar_j| over the training set
};

/// Strategy-1 baseline: fit the flow map directly, then iterate it.
inline FlowMapRun baseline_flowmap(const ExperimentConfig& cfg, const FlowDataset& data,
                                   std::optional<std::size_t> steps = {}, std::optional<Vector> z0 = {}) {
    const auto system = make_system(cfg.system);
    FlowMapGpModel model = fit_flowmap_baseline(data, default_flowmap_param_grid(cfg.domain.diameter()),
                                                default_flowmap_noise_grid());
    double worst = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j)
        worst = std::max(worst, (model.predict(data.inputs[j].coords()) - data.outputs[j].coords()).lpNorm<Eigen::Infinity>());
    const std::size_t n_steps = steps ? *steps : (cfg.flowmap_steps ? *cfg.flowmap_steps : cfg.steps);
    auto run = run_generic(PhaseState(z0 ? *z0 : cfg.z0), data.h, *system, nullptr, "",
                           RunOptions{cfg.output_stride, cfg.escape_threshold},
                           [&](const PhaseState& start, auto& visit) {
                               PhaseState z = start;
                               if (!visit(std::size_t{0}, z)) return;
                               for (std::size_t k = 0; k < n_steps; ++k) {
                                   z = predict_flowmap(model, z);
                                   if (!visit(k + 1, z)) return;
                               }
                           });
    run.record.method_tag = "flowmap_gp";
    run.record.field_tag = system->name();
    return {std::move(model), std::move(run), worst};
}

struct IdentifyResult {
    std::vector<double> sigma_by_order; ///< sigma(H - identified) on the mesh, per order
    CsvTable mesh_table;                ///< coordinates, exact H, identified H per order
    std::optional<CsvTable> potential_table;
    std::optional<double> potential_sigma;
};

inline std::string order_column(int k) { return "Htilde" + std::to_string(k); }

/// Evaluates the identified Hamiltonian on the config mesh for every available
/// order and reports sigma(H - identified) per order.
inline IdentifyResult identify(const GpHamiltonianModel& model, const ExperimentConfig& cfg) {
    if (cfg.mesh_points.empty()) throw ContractViolation("identify: config has no mesh");
    const auto system = make_system(cfg.system);
    const auto points = uniform_mesh(cfg.mesh());
    const int orders = max_order(model.integrator()) + 1;
    IdentifyResult out;
    out.mesh_table.header = coordinate_names(cfg.dof());
    out.mesh_table.header.push_back("H");
    for (int k = 0; k < orders; ++k) out.mesh_table.header.push_back(order_column(k));
    std::vector<std::vector<double>> diffs(static_cast<std::size_t>(orders));
    out.mesh_table.rows.reserve(points.size());
    for (const auto& x : points) {
        const PhaseState z(x);
        const double H = system->value(z);
        const auto ident = identify_all_orders(model, z);
        std::vector<double> row(x.data(), x.data() + x.size());
        row.push_back(H);
        for (int k = 0; k < orders; ++k) {
            row.push_back(ident[static_cast<std::size_t>(k)]);
            diffs[static_cast<std::size_t>(k)].push_back(H - ident[static_cast<std::size_t>(k)]);
        }
        out.mesh_table.rows.push_back(std::move(row));
    }
    for (const auto& d : diffs) {
        SeriesStats s;
        for (double v : d) s.add(0.0, v);
        out.sigma_by_order.push_back(std::sqrt(s.variance()));
    }
    if (!cfg.potential_mesh.empty()) {
        const Index n = cfg.dof();
        MeshSpec qmesh{DomainBox(cfg.domain.lower.head(n), cfg.domain.upper.head(n)), cfg.potential_mesh};
        CsvTable t;
        for (Index i = 1; i <= n; ++i) t.header.push_back("q" + std::to_string(i));
        t.header.push_back("V");
        t.header.push_back("V_identified");
        SeriesStats s;
        const TruncationOrder two(2);
        for (const auto& q : uniform_mesh(qmesh)) {
            const double v = system->value(PhaseState(q, Vector::Zero(n)));
            const double vr = recover_potential(model, q, two);
            std::vector<double> row(q.data(), q.data() + q.size());
            row.push_back(v);
            row.push_back(vr);
            t.rows.push_back(std::move(row));
            s.add(0.0, v - vr);
        }
        out.potential_table = std::move(t);
        out.potential_sigma = std::sqrt(s.variance());
    }
    return out;
}

/// Identified Hamiltonian per order along a trajectory, with summary variances.
struct ConservationResult {
    CsvTable table;                   ///< t, H, Htilde0..
    std::vector<double> variance_by_order;
    std::vector<double> band_by_order;
};

inline ConservationResult conservation_along(const GpHamiltonianModel& model, const TrajectoryRecord& traj,
                                             const HamiltonianField* exact) {
    const int orders = max_order(model.integrator()) + 1;
    ConservationResult out;
    out.table.header = {"t"};
    if (exact) out.table.header.push_back("H");
    for (int k = 0; k < orders; ++k) out.table.header.push_back(order_column(k));
    std::vector<SeriesStats> stats(static_cast<std::size_t>(orders));
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& z = traj.states[i];
        std::vector<double> row{traj.time(i)};
        if (exact) row.push_back(exact->value(z));
        const auto ident = identify_all_orders(model, z);
        for (int k = 0; k < orders; ++k) {
            row.push_back(ident[static_cast<std::size_t>(k)]);
            stats[static_cast<std::size_t>(k)].add(traj.time(i), ident[static_cast<std::size_t>(k)]);
        }
        out.table.rows.push_back(std::move(row));
    }
    for (const auto& s : stats) {
        out.variance_by_order.push_back(s.variance());
        out.band_by_order.push_back(s.band());
    }
    return out;
}

inline json stats_to_json(const SeriesStats& s) {
    return {{"count", s.count()}, {"mean", s.mean()}, {"band", s.band()}, {"slope", s.slope()},
            {"min", s.min()}, {"max", s.max()}};
}

} // namespace ssi::experiment

#endif // SSI_EXPERIMENT_HPP
