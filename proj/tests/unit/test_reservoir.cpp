#include <gtest/gtest.h>

#include <cmath>

#include "dissipative/core/random.hpp"
#include "dissipative/reservoir/reservoir.hpp"

using namespace dissipative;
using namespace dissipative::reservoir;

namespace {

Operator sigma_minus() { return Operator(gates::lowering(), SiteSystem::qubits(1)); }

}  // namespace

TEST(Embed, MatchesExplicitConstruction) {
  Rng rng(1);
  const Operator l(random_ginibre(2, 2, rng), SiteSystem::qubits(1));
  const double om = 0.7, ga = 13.0;
  const auto m = embed({l, om, ga});
  EXPECT_EQ(m.system.dims(), (std::vector<int>{2, 2}));
  Matrix sm = Matrix::Zero(2, 2);
  sm(0, 1) = 1.0;
  const Matrix h = om * (kron(l.matrix().adjoint(), sm) + kron(l.matrix(), Matrix(sm.adjoint())));
  ASSERT_TRUE(m.hamiltonian.has_value());
  EXPECT_LT(detail::max_abs(m.hamiltonian->matrix() - h), 1e-15);
  EXPECT_LT(m.hamiltonian->hermiticity_error(), 1e-12);
  ASSERT_EQ(m.jumps.size(), 1u);
  EXPECT_LT(detail::max_abs(m.jumps[0].matrix() - std::sqrt(ga) * kron(Matrix::Identity(2, 2), sm)), 1e-15);
}

TEST(Embed, DecoupledSystemIsInvariant) {
  Rng rng(2);
  const Operator l(random_ginibre(3, 3, rng), SiteSystem({3}));
  const auto m = embed({l, 0.0, 5.0});
  const auto gen = assemble_generator(m);
  const Matrix rho_sys = random_density(SiteSystem({3}), rng).matrix();
  const Matrix x0 = with_ground_ancillas(rho_sys, 1);
  for (double t : {0.1, 1.0, 10.0}) {
    const Matrix r = reduce_to_system(Propagator(gen, t).apply(x0), m.system, 1);
    EXPECT_LT(detail::max_abs(r - rho_sys), 1e-10);
  }
}

TEST(Embed, ErrorsAndBudget) {
  EXPECT_THROW(embed({sigma_minus(), -1.0, 10.0}), InputError);
  EXPECT_THROW(embed({sigma_minus(), 1.0, 0.0}), InputError);
  EXPECT_THROW(embed_all(SiteSystem::qubits(9), {Operator::identity(SiteSystem::qubits(9)), Operator::identity(SiteSystem::qubits(9))},
                         1.0, 10.0),
               BudgetExceeded);
  EXPECT_THROW(elimination_check({sigma_minus(), 0.0, 10.0}), InputError);
  EXPECT_FALSE((AncillaEmbedding{sigma_minus(), 2.0, 1.0}.in_elimination_regime()));
}

TEST(Elimination, ReducedDynamicsIsAmplitudeDamping) {
  const auto rep = elimination_check({sigma_minus(), 1.0, 100.0});
  // Closed-form amplitude damping at the fitted rate: p_1(t) = exp(-κ t).
  const auto m = embed({sigma_minus(), 1.0, 100.0});
  const auto gen = assemble_generator(m);
  const Matrix x0 = with_ground_ancillas(gates::proj1(), 1);
  for (double t : {5.0, 20.0, 60.0, 120.0}) {
    const Matrix r = reduce_to_system(Propagator(gen, t).apply(x0), m.system, 1);
    EXPECT_NEAR(r(1, 1).real(), std::exp(-rep.fitted_rate * t), 5e-3) << "t = " << t;
  }
  EXPECT_LE(rep.max_trace_distance, 0.05);
  EXPECT_LE(rep.steady_state_distance, 1e-9);
  EXPECT_NEAR(rep.horizon, 5.0 / rep.fitted_rate, 1e-12);
}

TEST(Elimination, SweepScalesAsInverseGamma) {
  const auto sweep = elimination_sweep(sigma_minus(), 1.0, {10.0, 30.0, 100.0});
  ASSERT_EQ(sweep.points.size(), 3u);
  EXPECT_NEAR(sweep.exponent, -1.0, 0.1);
  EXPECT_TRUE(sweep.mismatch_decreasing);
  EXPECT_LE(sweep.points[2].max_trace_distance, 0.05);
  const std::vector<double> gammas{10.0, 30.0, 100.0};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(sweep.points[i].gamma, gammas[i]);
  // Ordering is by grid index regardless of worker count.
  const auto threaded = elimination_sweep(sigma_minus(), 1.0, {10.0, 30.0, 100.0}, {}, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(threaded.points[i].fitted_rate, sweep.points[i].fitted_rate);
}

TEST(Elimination, SteadyStatesConvergeForGenericQubitTargets) {
  Rng rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    const Operator l(random_ginibre(2, 2, rng) / 2.0, SiteSystem::qubits(1));
    const auto rep = elimination_check({l, 1.0, 100.0});
    EXPECT_LE(rep.steady_state_distance, 0.05);
    EXPECT_LE(rep.max_trace_distance, 0.05);
  }
}

TEST(Elimination, TwoAncillasComposeIntoTwoJumps) {
  const SiteSystem sys = SiteSystem::qubits(2);
  const std::vector<Operator> targets{tensor_embed(LocalOperator::on_qubits(gates::lowering(), {0}), sys),
                                      tensor_embed(LocalOperator::on_qubits(gates::lowering(), {1}), sys)};
  const double gamma = 100.0;
  const double kappa = elimination_check({sigma_minus(), 1.0, gamma}).fitted_rate;
  const auto full = embed_all(sys, targets, 1.0, gamma);
  EXPECT_EQ(full.system.size(), 4u);
  const auto eff = effective_model(sys, targets, kappa);
  Rng rng(4);
  const Matrix rho = random_density(sys, rng).matrix();
  EXPECT_LE(reduced_mismatch(full, 2, eff, rho, 5.0 / kappa, 100), 0.05);
}

TEST(Parallel, OrderedAndExceptionsPropagate) {
  const auto sq = parallel_map(50, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(sq[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_map(
                   10,
                   [](std::size_t i) {
                     if (i == 7) throw NumericalError("boom");
                     return 0;
                   },
                   3),
               NumericalError);
}
