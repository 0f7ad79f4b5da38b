#include <gtest/gtest.h>

#include <algorithm>

#include "dissipative/core/gates.hpp"
#include "dissipative/core/random.hpp"
#include "dissipative/liouville/channel.hpp"
#include "dissipative/liouville/evolve.hpp"
#include "dissipative/liouville/spectrum.hpp"

using namespace dissipative;

namespace {

Superoperator amplitude_damping() {
  const auto q = SiteSystem::qubits(1);
  return assemble_generator(LindbladModel(q, std::nullopt, {Operator(gates::lowering(), q)}));
}

// Reference: L(X) computed directly from the operator formula.
Matrix lindblad_direct(const Matrix& h, const std::vector<Matrix>& ls, const Matrix& x) {
  Matrix out = -kI * (h * x - x * h);
  for (const auto& l : ls) {
    const Matrix ll = l.adjoint() * l;
    out += l * x * l.adjoint() - 0.5 * (ll * x + x * ll);
  }
  return out;
}

Matrix choi(const Matrix& sop, Eigen::Index d) {
  Matrix c = Matrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = 1.0;
      c += kron(e, unvec(sop * vec(e), d));
    }
  return c;
}

CpMapChannel random_channel(const SiteSystem& sys, int n_kraus, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(sys.total_dim());
  Matrix stacked = random_ginibre(d * n_kraus, d, rng);
  Eigen::HouseholderQR<Matrix> qr(stacked);
  const Matrix iso = qr.householderQ() * Matrix::Identity(d * n_kraus, d);
  std::vector<int> all(sys.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  ChannelBranch b;
  for (int k = 0; k < n_kraus; ++k) b.kraus.emplace_back(Operator(iso.middleRows(k * d, d), sys), all);
  return CpMapChannel(sys, {b});
}

double sorted_distance(std::vector<cplx> a, std::vector<cplx> b) {
  // Greedy matching of two multisets.
  double worst = 0.0;
  for (const cplx& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST(Generator, MatchesOperatorFormula) {
  Rng rng(1);
  const auto sys = SiteSystem::qubits(2);
  const Matrix h = random_hermitian(4, rng);
  const std::vector<Matrix> ls{random_ginibre(4, 4, rng), random_ginibre(4, 4, rng)};
  std::vector<Operator> jumps;
  for (const auto& l : ls) jumps.emplace_back(l, sys);
  const auto sop = assemble_generator(LindbladModel(sys, Operator(h, sys), jumps));
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_ginibre(4, 4, rng);
    EXPECT_LT(detail::max_abs(sop.apply(x) - lindblad_direct(h, ls, x)), 1e-12);
  }
  EXPECT_LT(sop.generator_trace_defect(), 1e-12);
}

TEST(Generator, AmplitudeDampingSpectrum) {
  const auto ev = sorted_eigenvalues(amplitude_damping().matrix());
  ASSERT_EQ(ev.size(), 4u);
  const std::vector<double> expect{0.0, -0.5, -0.5, -1.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(ev[i] - expect[i]), 0.0, 1e-12);
  const auto rep = spectral_gap(amplitude_damping());
  EXPECT_NEAR(rep.gap, 0.5, 1e-12);
  EXPECT_EQ(rep.steady_dim, 1);
}

TEST(Generator, TrivialModels) {
  const auto q = SiteSystem::qubits(1);
  EXPECT_LT(detail::max_abs(assemble_generator(LindbladModel(q, std::nullopt, {})).matrix()), 1e-300);
  EXPECT_LT(detail::max_abs(assemble_generator(LindbladModel(q, std::nullopt, {Operator::identity(q)})).matrix()), 1e-15);
  EXPECT_THROW(LindbladModel(q, Operator(gates::lowering(), q), {}), InputError);
  EXPECT_THROW(LindbladModel(q, std::nullopt, {Operator::identity(SiteSystem::qubits(2))}), InputError);
}

TEST(Generator, GapScalesLinearly) {
  const auto base = amplitude_damping();
  for (double c : {0.3, 2.0, 7.5}) EXPECT_NEAR(spectral_gap(c * base).gap, 0.5 * c, 1e-12);
}

TEST(SteadyStates, AmplitudeDampingDarkState) {
  const auto states = steady_states(amplitude_damping());
  ASSERT_EQ(states.size(), 1u);
  EXPECT_NEAR(states[0].matrix()(0, 0).real(), 1.0, 1e-12);
}

TEST(SteadyStates, ZeroGeneratorHasFullKernel) {
  const auto q = SiteSystem::qubits(1);
  const auto sop = assemble_generator(LindbladModel(q, std::nullopt, {}));
  EXPECT_EQ(steady_space(sop).dim, 4);
}

TEST(SteadyStates, RandomGeneratorKernelResidual) {
  Rng rng(12);
  const auto sys = SiteSystem::qubits(2);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Operator> jumps{Operator(random_ginibre(4, 4, rng), sys), Operator(random_ginibre(4, 4, rng), sys)};
    const auto sop = assemble_generator(LindbladModel(sys, Operator(random_hermitian(4, rng), sys), jumps));
    const auto states = steady_states(sop);
    ASSERT_EQ(states.size(), 1u);
    EXPECT_LT(vec(sop.apply(states[0].matrix())).norm(), 1e-8);
    EXPECT_GE(states[0].min_eigenvalue(), -1e-9);
  }
}

TEST(BlockComponents, TriangularStructureAndSpectrum) {
  Rng rng(13);
  // Block lower-triangular matrix hidden by a permutation.
  Matrix m = Matrix::Zero(6, 6);
  m.block(0, 0, 2, 2) = random_ginibre(2, 2, rng);
  m.block(2, 2, 3, 3) = random_ginibre(3, 3, rng);
  m(5, 5) = 2.0;
  m.block(2, 0, 3, 2) = random_ginibre(3, 2, rng);
  m(5, 3) = 1.0;
  std::vector<int> perm{4, 1, 5, 0, 3, 2};
  Matrix p = Matrix::Zero(6, 6);
  for (int i = 0; i < 6; ++i) p(i, perm[i]) = 1.0;
  const Matrix pm = p * m * p.transpose();
  const auto comps = block_components(pm);
  EXPECT_EQ(comps.size(), 3u);
  Eigen::ComplexEigenSolver<Matrix> es(pm);
  std::vector<cplx> expect(es.eigenvalues().data(), es.eigenvalues().data() + 6);
  EXPECT_LT(sorted_distance(eigenvalues(pm), expect), 1e-10);
}

TEST(KernelBasis, MatchesSvdNullSpace) {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_ginibre(7, 4, rng) * random_ginibre(4, 7, rng);
    const Matrix k = kernel_basis(a);
    EXPECT_EQ(k.cols(), 3);
    EXPECT_LT(detail::max_abs(a * k), 1e-9);
  }
}

TEST(Evolve, IdentityAtZeroTime) {
  Rng rng(2);
  const auto rho = random_density(SiteSystem::qubits(1), rng);
  EXPECT_LT(detail::max_abs(evolve(amplitude_damping(), rho, 0.0).matrix() - rho.matrix()), 1e-300);
}

TEST(Evolve, AmplitudeDampingClosedForm) {
  const auto one = DensityMatrix::basis_state(1, SiteSystem::qubits(1));
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0})
    EXPECT_NEAR(evolve(amplitude_damping(), one, t).matrix()(1, 1).real(), std::exp(-t), 1e-9);
}

TEST(Evolve, CompletePositivityAndPreservationProperties) {
  Rng rng(15);
  const auto sys = SiteSystem::qubits(2);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Operator> jumps{Operator(random_ginibre(4, 4, rng), sys)};
    const auto sop = assemble_generator(LindbladModel(sys, Operator(random_hermitian(4, rng), sys), jumps));
    for (double t : {0.1, 1.0}) {
      const Propagator prop(sop, t);
      EXPECT_GE(hermitian_eigenvalues(choi(prop.matrix(), 4)).minCoeff(), -1e-8);
      const auto rho = random_density(sys, rng);
      const Matrix out = prop.apply(rho.matrix());
      EXPECT_NEAR(std::abs(out.trace() - 1.0), 0.0, 1e-8);
      EXPECT_LT(detail::max_abs(out - out.adjoint()), 1e-8);
    }
  }
}

TEST(Channel, IdentityAndDepolarizing) {
  Rng rng(3);
  const auto q = SiteSystem::qubits(1);
  const auto rho = random_density(q, rng);
  EXPECT_LT(detail::max_abs(apply_channel(CpMapChannel::identity(q), rho).matrix() - rho.matrix()), 1e-15);
  ChannelBranch dep;
  dep.replacements.push_back({{0}, Matrix::Identity(2, 2), Matrix::Identity(2, 2) / 2.0});
  const CpMapChannel depol(q, {dep});
  EXPECT_LT(detail::max_abs(apply_channel(depol, rho).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
  // The compact replacement form agrees with its Kraus expansion.
  EXPECT_LT(detail::max_abs(depol.superoperator().apply(rho.matrix()) - Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(Channel, RejectsNonTracePreserving) {
  const auto q = SiteSystem::qubits(1);
  ChannelBranch b;
  b.kraus.push_back(LocalOperator::on_qubits(gates::proj0(), {0}));
  EXPECT_THROW(CpMapChannel(q, {b}), InputError);
  ChannelBranch neg;
  neg.probability = -0.5;
  EXPECT_THROW(CpMapChannel(q, {neg}), InputError);
}

TEST(Channel, LocalApplyMatchesSuperoperator) {
  Rng rng(16);
  const SiteSystem sys({2, 3, 2});
  ChannelBranch b1, b2;
  b1.probability = 0.3;
  const Matrix u = random_unitary(6, rng);
  b1.kraus.emplace_back(u, std::vector<int>{2, 1}, std::vector<int>{2, 3});
  b2.probability = 0.7;
  const Matrix p = random_projector(4, 2, rng);
  b2.kraus.emplace_back(p, std::vector<int>{0, 2}, std::vector<int>{2, 2});
  b2.replacements.push_back({{0, 2}, Matrix::Identity(4, 4) - p, random_density(SiteSystem::qubits(2), rng).matrix()});
  const CpMapChannel ch(sys, {b1, b2});
  const auto s = ch.superoperator();
  EXPECT_LT(s.channel_trace_defect(), 1e-12);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_ginibre(12, 12, rng);
    EXPECT_LT(detail::max_abs(ch.apply(x) - s.apply(x)), 1e-12);
  }
}

TEST(Channel, AdjointDuality) {
  Rng rng(17);
  const auto sys = SiteSystem::qubits(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ch = random_channel(sys, 3, rng);
    const auto adj = channel_adjoint(ch);
    const auto rho = random_density(sys, rng);
    const Matrix x = random_ginibre(4, 4, rng);
    const cplx lhs = (ch.apply(rho.matrix()) * x).trace();
    const cplx rhs = (rho.matrix() * adj.apply(x)).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
    EXPECT_LT(detail::max_abs(adj.apply(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)), 1e-9);
  }
  const auto id_adj = channel_adjoint(CpMapChannel::identity(sys));
  EXPECT_LT(detail::max_abs(id_adj.matrix() - Matrix::Identity(16, 16)), 1e-15);
}

TEST(ChannelToGenerator, IdentityGivesZero) {
  const auto sys = SiteSystem::qubits(2);
  EXPECT_LT(detail::max_abs(channel_to_generator(CpMapChannel::identity(sys), 3).matrix()), 1e-15);
  EXPECT_THROW(channel_to_generator(CpMapChannel::identity(sys), 0), InputError);
}

TEST(ChannelToGenerator, SpectralShiftAndFixedPoint) {
  Rng rng(18);
  const auto sys = SiteSystem::qubits(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ch = random_channel(sys, 2, rng);
    const int n = 1 + trial;
    const auto gen = channel_to_generator(ch, n);
    std::vector<cplx> mapped;
    for (const cplx& l : eigenvalues(ch.superoperator().matrix())) mapped.push_back(static_cast<double>(n) * (l - 1.0));
    EXPECT_LT(sorted_distance(eigenvalues(gen.matrix()), mapped), 1e-10);
    const auto st = steady_states(gen);
    ASSERT_EQ(st.size(), 1u);
    DensityMatrix rho = DensityMatrix::maximally_mixed(sys);
    for (int k = 0; k < 2000; ++k) rho = ch.apply(rho);
    EXPECT_GE(fidelity(rho, st[0]), 1.0 - 1e-9);
  }
}

TEST(ChannelToGenerator, IterationApproachesGeneratorEvolution) {
  Rng rng(19);
  const auto sys = SiteSystem::qubits(1);
  const auto ch = random_channel(sys, 2, rng);
  // Rescaled channel near the identity: T_eps = (1 - eps) id + eps T.
  const double eps = 0.05;
  ChannelBranch keep;
  keep.kraus.push_back(LocalOperator::on_qubits(gates::identity(), {0}));
  const auto near = CpMapChannel::mixture({{1.0 - eps, CpMapChannel(sys, {keep})}, {eps, ch}});
  const auto rho0 = random_density(sys, rng);
  const auto gen = channel_to_generator(near, 1);
  double prev = 1e300;
  for (int k : {20, 200, 2000}) {
    DensityMatrix rho = rho0;
    for (int i = 0; i < k; ++i) rho = near.apply(rho);
    const double dist = trace_distance(rho, evolve(gen, rho0, static_cast<double>(k)));
    EXPECT_LE(dist, prev + 1e-14);
    prev = dist;
  }
}
