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

#include <gtest/gtest.h>

#include "support.hpp"

using namespace ssi;
using ssi::testing::Gen;
using ssi::testing::trained_pendulum;

namespace {

FlowDataset fixed_point_dataset(const std::vector<PhaseState>& ys, double h) {
    FlowDataset d;
    d.inputs = ys;
    d.outputs = ys;
    d.h = h;
    return d;
}

// A small, well-conditioned GP model with random node values. Serves as a
// known inverse modified Hamiltonian for synthesize-then-recover checks.
GpHamiltonianModel synthetic_model(IntegratorTag tag, std::uint64_t seed) {
    const DomainBox box = ssi::testing::box_around(1, 1.0);
    const auto Z = to_phase_states(halton_sequence(2, 12, box));
    Gen gen(seed);
    Vector v(12);
    for (Index i = 0; i < 12; ++i) v(i) = gen.uniform(-1.0, 1.0);
    return GpHamiltonianModel(factorize_regularized(Z, {1.0, 1.0}, 1e-12), v, tag, 0.1, Normalization{Z[0], 0.0});
}

} // namespace

TEST(AssembleSe, PendulumProtocolShape) {
    const auto& t = trained_pendulum(160, IntegratorTag::SymplecticEuler);
    const auto sys = assemble_se_system(t.data, t.model->gram(), t.model->normalization());
    EXPECT_EQ(sys.A.rows(), 321);
    EXPECT_EQ(sys.A.cols(), 160);
    EXPECT_EQ(sys.b.size(), 321);
}

TEST(AssembleSe, HenonHeilesProtocolShape) {
    const HenonHeilesSystem hh(0.8);
    const auto Y = to_phase_states(halton_sequence(4, 800, ssi::testing::hh_box()));
    const auto data = fixed_point_dataset(Y, 0.1);
    const auto sys = assemble_se_system(data, Y, {1.0, 5.0}, 1e-13, Normalization{Y[0], 0.0});
    EXPECT_EQ(sys.A.rows(), 3201);
    EXPECT_EQ(sys.A.cols(), 800);
}

TEST(AssembleSe, StationaryDatumHasZeroRightHandSide) {
    const auto Y = to_phase_states(halton_sequence(2, 5, ssi::testing::pendulum_box()));
    const auto sys = assemble_se_system(fixed_point_dataset(Y, 0.3), Y, {1.0, 2.0}, 1e-13, Normalization{Y[0], 1.5});
    EXPECT_EQ(sys.b.head(10), Vector::Zero(10));
    EXPECT_EQ(sys.b(10), 1.5);
}

TEST(AssembleSe, RowsUseNewPositionAndOldMomentum) {
    const std::vector<PhaseState> Z = to_phase_states(halton_sequence(2, 6, ssi::testing::box_around(1, 1.0)));
    FlowDataset d;
    d.inputs = {PhaseState(Eigen::Vector2d(0.1, 0.2))};
    d.outputs = {PhaseState(Eigen::Vector2d(0.3, -0.4))};
    d.h = 0.5;
    const auto gram = factorize_regularized(Z, {1.0, 1.0}, 1e-12);
    const auto sys = assemble_se_system(d, gram, Normalization{Z[0], 0.0});
    const Matrix expected =
        gram.solve(Matrix(kernel_gradient_block(Eigen::Vector2d(0.3, 0.2), gram.nodes(), gram.params()).transpose()))
            .transpose();
    EXPECT_LE((sys.A.topRows(2) - expected).norm(), 1e-12 * expected.norm());
    // J (ybar - y) / h with J(a, b) = (-b, a).
    EXPECT_NEAR(sys.b(0), 0.6 / 0.5, 1e-15);
    EXPECT_NEAR(sys.b(1), 0.2 / 0.5, 1e-15);
}

TEST(AssembleMp, PendulumProtocolShape) {
    const auto Y = to_phase_states(halton_sequence(2, 400, ssi::testing::pendulum_box()));
    const auto sys = assemble_mp_system(fixed_point_dataset(Y, 0.3), Y, {1.0, 2.0}, 1e-13, Normalization{Y[0], 0.0});
    EXPECT_EQ(sys.A.rows(), 801);
    EXPECT_EQ(sys.A.cols(), 400);
}

TEST(AssembleMp, StationaryDatumEvaluatesAtTheInput) {
    const auto Z = to_phase_states(halton_sequence(2, 6, ssi::testing::box_around(1, 1.0)));
    const PhaseState y(Eigen::Vector2d(0.2, -0.1));
    const auto gram = factorize_regularized(Z, {1.0, 1.0}, 1e-12);
    const auto sys = assemble_mp_system(fixed_point_dataset({y}, 0.1), gram, Normalization{Z[0], 0.0});
    EXPECT_EQ(sys.b.head(2), Vector::Zero(2));
    const Matrix expected =
        gram.solve(Matrix(kernel_gradient_block(y.coords(), gram.nodes(), gram.params()).transpose())).transpose();
    EXPECT_LE((sys.A.topRows(2) - expected).norm(), 1e-12 * expected.norm());
}

TEST(AssembleMp, SwappingInputAndOutputNegatesRightHandSideOnly) {
    const auto Z = to_phase_states(halton_sequence(2, 6, ssi::testing::box_around(1, 1.0)));
    const PhaseState y(Eigen::Vector2d(0.2, -0.1)), ybar(Eigen::Vector2d(0.25, -0.3));
    FlowDataset fwd{{y}, {ybar}, 0.1};
    FlowDataset bwd{{ybar}, {y}, 0.1};
    const auto gram = factorize_regularized(Z, {1.0, 1.0}, 1e-12);
    const auto a = assemble_mp_system(fwd, gram, Normalization{Z[0], 0.0});
    const auto b = assemble_mp_system(bwd, gram, Normalization{Z[0], 0.0});
    EXPECT_EQ(a.A, b.A);
    EXPECT_EQ(a.b.head(2), Vector(-b.b.head(2)));
}

TEST(AssembleSe, DimensionMismatchIsContractViolation) {
    const auto Z = to_phase_states(halton_sequence(4, 6, ssi::testing::hh_box()));
    const auto Y = to_phase_states(halton_sequence(2, 3, ssi::testing::pendulum_box()));
    EXPECT_THROW(assemble_se_system(fixed_point_dataset(Y, 0.1), Z, {1.0, 1.0}, 1e-12, Normalization{Z[0], 0.0}),
                 ContractViolation);
}

namespace {

void synthesize_then_recover(IntegratorTag tag) {
    const auto truth = synthetic_model(tag, 31);
    const GpField field = as_field(truth);
    const auto Y = to_phase_states(halton_sequence(2, 40, ssi::testing::box_around(1, 0.9), 50));
    FlowDataset data;
    data.h = truth.h();
    ImplicitSolveOptions tight;
    tight.tolerance = 1e-15;
    tight.stagnation_tolerance = 1e-14;
    for (const auto& y : Y) {
        data.inputs.push_back(y);
        data.outputs.push_back(tag == IntegratorTag::SymplecticEuler ? symplectic_euler_step(field, y, data.h, tight)
                                                                     : implicit_midpoint_step(field, y, data.h, tight));
    }
    std::vector<PhaseState> nodes;
    for (Index i = 0; i < truth.nodes().cols(); ++i) nodes.emplace_back(Vector(truth.nodes().col(i)));
    const Normalization norm{Y[0], gp_mean(truth, Y[0])};
    const auto model = train(data, nodes, truth.params(), truth.sigma(), tag, norm);
    EXPECT_LE((model.node_values() - truth.node_values()).norm(), 1e-6 * truth.node_values().norm());
}

} // namespace

TEST(Train, RecoversSyntheticSymplecticEulerHamiltonian) { synthesize_then_recover(IntegratorTag::SymplecticEuler); }

TEST(Train, RecoversSyntheticMidpointHamiltonian) { synthesize_then_recover(IntegratorTag::ImplicitMidpoint); }

TEST(Train, PendulumProtocolSucceeds) {
    const auto& t = trained_pendulum(160, IntegratorTag::SymplecticEuler);
    EXPECT_EQ(t.model->diagnostics().rows, 321);
    EXPECT_EQ(t.model->diagnostics().cols, 160);
    EXPECT_TRUE(t.model->node_values().allFinite());
    EXPECT_EQ(t.model->sigma(), 1e-13);
}

TEST(Train, SingleStationaryDatumGivesMinimumNormZeroSolution) {
    const std::vector<PhaseState> Y{PhaseState(Eigen::Vector2d(0.3, 0.2))};
    const auto model = train(fixed_point_dataset(Y, 0.1), Y, {1.0, 1.0}, 0.0, IntegratorTag::SymplecticEuler,
                             Normalization{Y[0], 0.0});
    EXPECT_EQ(model.node_values(), Vector::Zero(1));
    EXPECT_EQ(gp_mean(model, Y[0]), 0.0);
}

TEST(Train, NormalizationReproducedWithinResidual) {
    for (auto tag : {IntegratorTag::SymplecticEuler, IntegratorTag::ImplicitMidpoint}) {
        const auto& t = trained_pendulum(tag == IntegratorTag::SymplecticEuler ? 160 : 400, tag);
        const auto& norm = t.model->normalization();
        EXPECT_LE(std::abs(gp_mean(*t.model, norm.point) - norm.value), t.model->residual());
    }
}

TEST(Train, LeastSquaresOptimality) {
    const auto& t = trained_pendulum(160, IntegratorTag::SymplecticEuler);
    const auto sys = assemble_se_system(t.data, t.model->gram(), t.model->normalization());
    const double best = (sys.A * t.model->node_values() - sys.b).norm();
    Gen gen(32);
    for (int i = 0; i < 20; ++i) {
        const Vector v = t.model->node_values() + 1e-3 * gen.unit_vector(160);
        EXPECT_GE((sys.A * v - sys.b).norm(), best * (1.0 - 1e-12));
    }
}

TEST(GpMean, ZeroValuesGiveZeroEverywhere) {
    const auto Z = to_phase_states(halton_sequence(2, 5, ssi::testing::box_around(1, 1.0)));
    const GpHamiltonianModel m(factorize_regularized(Z, {1.0, 1.0}, 1e-12), Vector::Zero(5),
                               IntegratorTag::SymplecticEuler, 0.1, Normalization{Z[0], 0.0});
    Gen gen(33);
    for (int i = 0; i < 10; ++i) {
        const PhaseState y = gen.state(ssi::testing::box_around(1, 3.0));
        EXPECT_EQ(gp_mean(m, y), 0.0);
        EXPECT_EQ(gp_grad(m, y), Vector::Zero(2));
        EXPECT_EQ(gp_hess(m, y), Matrix::Zero(2, 2));
    }
}

TEST(GpMean, InterpolatesSingleNodeWithoutRegularization) {
    const std::vector<PhaseState> Z{PhaseState(Eigen::Vector2d(0.4, -0.2))};
    const GpHamiltonianModel m(factorize_regularized(Z, {1.0, 1.0}, 0.0), Vector::Constant(1, 2.75),
                               IntegratorTag::SymplecticEuler, 0.1, Normalization{Z[0], 2.75});
    EXPECT_EQ(gp_mean(m, Z[0]), 2.75);
}

TEST(GpMean, MatchesDefiningFormula) {
    const auto m = synthetic_model(IntegratorTag::SymplecticEuler, 34);
    const PhaseState y(Eigen::Vector2d(0.1, 0.3));
    const Matrix K = gram_matrix(m.nodes(), m.params()) + m.sigma() * Matrix::Identity(12, 12);
    const double expected = kernel_vector(y.coords(), m.nodes(), m.params()).dot(K.ldlt().solve(m.node_values()));
    EXPECT_NEAR(gp_mean(m, y), expected, 1e-10 * std::max(1.0, std::abs(expected)));
}

TEST(GpMean, DimensionMismatchIsContractViolation) {
    const auto m = synthetic_model(IntegratorTag::SymplecticEuler, 35);
    EXPECT_THROW(gp_mean(m, PhaseState::zero(2)), ContractViolation);
}

namespace {

void check_gp_derivatives(const GpHamiltonianModel& m, const DomainBox& box, std::uint64_t seed, double step,
                          bool fourth_order, double grad_tol, double hess_tol) {
    Gen gen(seed);
    for (int i = 0; i < 100; ++i) {
        const Vector y = gen.in_box(box);
        const Vector g = m.gradient(y);
        const auto mean = [&](const Vector& v) { return m.mean(v); };
        const auto grad = [&](const Vector& v) { return m.gradient(v); };
        const Vector g_fd = fourth_order ? ssi::testing::fd_gradient5(mean, y, step) : ssi::testing::fd_gradient(mean, y, step);
        EXPECT_LE((g - g_fd).norm(), grad_tol * std::max(1.0, g.norm())) << "point " << i;
        const Matrix H = m.hessian(y);
        const Matrix H_fd = fourth_order ? ssi::testing::fd_jacobian5(grad, y, step) : ssi::testing::fd_jacobian(grad, y, step);
        EXPECT_LE((H - H_fd).norm(), hess_tol * std::max(1.0, H.norm())) << "point " << i;
        EXPECT_EQ(H, Matrix(H.transpose()));
    }
}

} // namespace

TEST(GpDerivatives, SyntheticModelMatchesFiniteDifferences) {
    check_gp_derivatives(synthetic_model(IntegratorTag::SymplecticEuler, 36), ssi::testing::box_around(1, 1.0), 37,
                         1e-5, false, 1e-6, 1e-5);
}

TEST(GpDerivatives, TrainedPendulumModelMatchesFiniteDifferences) {
    // Node weights reach ~1e7, so evaluations carry rounding noise that swamps
    // small central differences. A fourth-order stencil at a wider step keeps
    // both truncation and noise below the tolerance.
    check_gp_derivatives(*trained_pendulum(160, IntegratorTag::SymplecticEuler).model, ssi::testing::pendulum_box(),
                         38, 3e-2, true, 1e-6, 1e-5);
}

TEST(GpDerivatives, FarFieldGradientVanishes) {
    const auto m = synthetic_model(IntegratorTag::SymplecticEuler, 39);
    const PhaseState far(Eigen::Vector2d(40.0, -40.0));
    EXPECT_LT(gp_grad(m, far).norm(), 1e-12 * m.node_values().norm());
}

TEST(AsField, DelegatesBitwise) {
    const auto m = synthetic_model(IntegratorTag::ImplicitMidpoint, 40);
    const GpField f = as_field(m);
    EXPECT_EQ(f.dim(), 1);
    Gen gen(41);
    for (int i = 0; i < 10; ++i) {
        const PhaseState y = gen.state(ssi::testing::box_around(1, 1.0));
        EXPECT_EQ(f.value(y), gp_mean(m, y));
        EXPECT_EQ(f.gradient(y), gp_grad(m, y));
        EXPECT_EQ(f.hessian(y), gp_hess(m, y));
    }
}

namespace {

void check_round_trip(IntegratorTag tag, std::size_t N) {
    const auto& t = trained_pendulum(N, tag);
    const GpField field = as_field(*t.model);
    const double rows = static_cast<double>(t.model->diagnostics().rows);
    const double bound = 10.0 * t.model->residual() / std::sqrt(rows);
    ImplicitSolveOptions opts;
    opts.stagnation_tolerance = 1e-7;
    double worst = 0.0;
    for (std::size_t j = 0; j < t.data.size(); ++j) {
        const auto out = tag == IntegratorTag::SymplecticEuler
                             ? symplectic_euler_step(field, t.data.inputs[j], t.data.h, opts)
                             : implicit_midpoint_step(field, t.data.inputs[j], t.data.h, opts);
        worst = std::max(worst, (out.coords() - t.data.outputs[j].coords()).lpNorm<Eigen::Infinity>());
    }
    EXPECT_LE(worst, bound) << "residual " << t.model->residual();
}

} // namespace

TEST(RoundTrip, SymplecticEulerReproducesTrainingOutputs) { check_round_trip(IntegratorTag::SymplecticEuler, 160); }

TEST(RoundTrip, MidpointReproducesTrainingOutputs) { check_round_trip(IntegratorTag::ImplicitMidpoint, 400); }
