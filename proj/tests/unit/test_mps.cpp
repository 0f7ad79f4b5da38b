#include <gtest/gtest.h>

#include <cmath>

#include "dissipative/core/random.hpp"
#include "dissipative/io/mps_format.hpp"
#include "dissipative/mps/preparation.hpp"

using namespace dissipative;
using namespace dissipative::mps;

namespace {

// Two spin-1 sites, basis m = +1, 0, -1: projector onto total spin 2.
Matrix spin2_projector() {
  Matrix sp = Matrix::Zero(3, 3);
  sp(0, 1) = std::sqrt(2.0);
  sp(1, 2) = std::sqrt(2.0);
  const Matrix sm = sp.adjoint();
  const Matrix sx = (sp + sm) / 2.0, sy = (sp - sm) / (2.0 * kI);
  Matrix sz = Matrix::Zero(3, 3);
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  const Matrix id = Matrix::Identity(3, 3);
  Matrix s2 = Matrix::Zero(9, 9);
  for (const Matrix& s : {sx, sy, sz}) {
    const Matrix tot = kron(s, id) + kron(id, s);
    s2 += tot * tot;
  }
  return s2 * (s2 - 2.0 * Matrix::Identity(9, 9)) / 24.0;
}

// Embed a two-site operator on sites (a, b) of an N-site ring with local dimension d,
// by explicit index arithmetic.
Matrix embed_pair(const Matrix& op, int a, int b, int n, int d) {
  const auto dim = static_cast<Eigen::Index>(std::pow(d, n));
  Matrix out = Matrix::Zero(dim, dim);
  auto digit = [&](Eigen::Index idx, int site) { return static_cast<int>((idx / static_cast<Eigen::Index>(std::pow(d, n - 1 - site))) % d); };
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      bool rest_equal = true;
      for (int s = 0; s < n; ++s)
        if (s != a && s != b && digit(i, s) != digit(j, s)) rest_equal = false;
      if (!rest_equal) continue;
      out(i, j) = op(digit(i, a) * d + digit(i, b), digit(j, a) * d + digit(j, b));
    }
  return out;
}

// R on pair (a, b) from its Kraus form {P} ∪ {(1/D)|φ_a><ψ_b|}.
Matrix apply_r_kraus(const Matrix& x, const Matrix& p, int a, int b, int n, int d, int bond) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  const Eigen::Index r = bond * bond;
  const Matrix range = es.eigenvectors().rightCols(r), ker = es.eigenvectors().leftCols(d * d - r);
  const Matrix pf = embed_pair(p, a, b, n, d);
  Matrix out = pf * x * pf.adjoint();
  for (Eigen::Index i = 0; i < range.cols(); ++i)
    for (Eigen::Index j = 0; j < ker.cols(); ++j) {
      const Matrix k = embed_pair(range.col(i) * ker.col(j).adjoint() / static_cast<double>(bond), a, b, n, d);
      out += k * x * k.adjoint();
    }
  return out;
}

const PreparationTarget& aklt4() {
  static const PreparationTarget t = make_target(aklt(4));
  return t;
}

}  // namespace

TEST(MpsState, GhzAndProductContractions) {
  const Vector g = mps_to_state(ghz(3));
  Vector expect = Vector::Zero(8);
  expect(0) = expect(7) = 1.0 / std::sqrt(2.0);
  EXPECT_LT((g - expect).norm(), 1e-15);

  Matrix a0(1, 1), a1(1, 1);
  a0(0, 0) = 0.6;
  a1(0, 0) = cplx(0.0, 0.8);
  const Vector prod = mps_to_state(MatrixProductState({a0, a1}, 3));
  Vector site(2);
  site << 0.6, cplx(0.0, 0.8);
  const Vector oracle = kron(kron(Matrix(site), Matrix(site)), Matrix(site));
  EXPECT_LT((prod - oracle).norm(), 1e-15);
}

TEST(MpsState, WLikeIsProductPlusAllZero) {
  const double x = 0.2;
  const Vector w = mps_to_state(w_like(3, x));
  Vector site(2);
  site << 1.0, x;
  Vector oracle = kron(kron(Matrix(site), Matrix(site)), Matrix(site));
  oracle(0) += 1.0;
  oracle /= oracle.norm();
  EXPECT_LT((w - oracle).norm(), 1e-15);
}

TEST(MpsState, RejectsBadInput) {
  EXPECT_THROW(MatrixProductState({Matrix::Identity(2, 2), Matrix::Identity(3, 3)}, 4), InputError);
  EXPECT_THROW(MatrixProductState({Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, 1), InputError);
  EXPECT_THROW(MatrixProductState({Matrix::Identity(2, 2)}, 3), InputError);
  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  EXPECT_THROW(mps_to_state(MatrixProductState({nil, nil}, 3)), NumericalError);
}

TEST(MpsState, AkltAnnihilatedBySpinTwoProjectors) {
  const Vector psi = mps_to_state(aklt(4));
  const Matrix p2 = spin2_projector();
  for (int k = 0; k < 4; ++k) EXPECT_LT((embed_pair(p2, k, (k + 1) % 4, 4, 3) * psi).norm(), 1e-10);
}

TEST(ParentHamiltonian, AkltProjectorsAreSpinTwo) {
  EXPECT_TRUE(is_injective(aklt(4)));
  const auto pp = pair_projectors(aklt(4));
  EXPECT_NEAR(pp.P.trace().real(), 4.0, 1e-10);
  EXPECT_LT(detail::max_abs(pp.H - spin2_projector()), 1e-8);
  // Reduced state from the full vector agrees with the transfer-matrix one.
  const Vector psi = mps_to_state(aklt(4));
  const Matrix rho2 = partial_trace(Operator(psi * psi.adjoint(), SiteSystem::uniform(4, 3)), {2, 3}).matrix();
  EXPECT_LT(detail::max_abs(rho2 - two_site_reduced(aklt(4))), 1e-12);
}

TEST(ParentHamiltonian, FrustrationFreeWithUniqueGroundState) {
  const auto h = parent_hamiltonian(aklt(4));
  const auto rep = dse::validate(h);
  EXPECT_TRUE(rep.frustration_free);
  EXPECT_EQ(rep.ground_dim, 1);
  const Vector psi = mps_to_state(aklt(4));
  EXPECT_LT(detail::max_abs(h.ground_projector() - psi * psi.adjoint()), 1e-9);
  // Open chain: four edge states.
  EXPECT_EQ(dse::validate(parent_hamiltonian(aklt(4), false)).ground_dim, 4);
}

TEST(ParentHamiltonian, NonInjectiveRejected) {
  EXPECT_FALSE(is_injective(ghz(4)));
  EXPECT_THROW(two_site_projectors(ghz(4)), InputError);
  EXPECT_FALSE(is_injective(w_like(4)));
  EXPECT_THROW(two_site_projectors(w_like(4)), InputError);
  EXPECT_THROW(two_site_projectors(aklt(2)), InputError);  // two-site ring is pure
}

TEST(Schedule, ParamsAndBudget) {
  const ScheduleParams p(50.0, 4);
  EXPECT_EQ(p.levels(), 2);
  EXPECT_DOUBLE_EQ(p.M(), 800.0);
  EXPECT_DOUBLE_EQ(p.eps(2), 1.0 / 800.0);
  EXPECT_DOUBLE_EQ(p.eps(3), 1.0 / 640000.0);
  EXPECT_DOUBLE_EQ(p.repetitions(1), 400.0);
  EXPECT_EQ(p.step_budget(), 40000);
  const ScheduleParams big(50.0, 16);
  for (int r = 2; r <= 4; ++r) {
    EXPECT_GT(big.eps(r), big.eps(r + 1));
    EXPECT_GT(big.eps(r + 1), 0.0);
    EXPECT_LT(big.eps(r), 1.0);
  }
  EXPECT_EQ(big.step_budget(), 1000000);
  EXPECT_THROW(ScheduleParams(50.0, 6), InputError);
  EXPECT_THROW(ScheduleParams(-1.0, 4), InputError);
  EXPECT_THROW(p.eps(1), InputError);
}

TEST(ChannelR, PairIndices) {
  const auto& t = aklt4();
  EXPECT_EQ(pair_index(t, 1, 1), 1);
  EXPECT_EQ(pair_index(t, 1, 2), 3);
  EXPECT_EQ(pair_index(t, 2, 1), 2);
  EXPECT_EQ(pair_index(t, 2, 2), 4);  // ring-closing pair
  EXPECT_EQ(channel_R(t, 1, 1).branches()[0].kraus[0].support(), (std::vector<int>{0, 1}));
  EXPECT_EQ(channel_R(t, 2, 1).branches()[0].kraus[0].support(), (std::vector<int>{1, 2}));
  EXPECT_EQ(channel_R(t, 2, 2).branches()[0].kraus[0].support(), (std::vector<int>{3, 0}));
  EXPECT_THROW(channel_R(t, 1, 3), InputError);
  EXPECT_THROW(channel_R(t, 3, 1), InputError);
  EXPECT_THROW(channel_R(t, 0, 1), InputError);
}

TEST(ChannelR, MatchesKrausRealization) {
  const auto& t = aklt4();
  Rng rng(11);
  const std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> cases{{{1, 1}, {0, 1}}, {{2, 1}, {1, 2}}, {{2, 2}, {3, 0}}};
  for (const auto& [rc, ab] : cases) {
    const auto ch = channel_R(t, rc.first, rc.second);
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix x = random_ginibre(81, 81, rng);
      EXPECT_LT(detail::max_abs(ch.apply(x) - apply_r_kraus(x, t.pair.P, ab.first, ab.second, 4, 3, 2)), 1e-12);
    }
  }
}

TEST(ChannelR, TracePreservingAndRangeInputsUnchanged) {
  const auto& t = aklt4();
  Rng rng(12);
  const auto ch = channel_R(t, 1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto out = ch.apply(random_density(t.system, rng, 1 + trial % 3));
    EXPECT_NEAR(out.op().trace().real(), 1.0, 1e-10);
    EXPECT_GE(out.min_eigenvalue(), -1e-9);
  }
  // ρ supported in range(P) on sites (0,1): P ρ P = ρ.
  const Matrix pf = embed_pair(t.pair.P, 0, 1, 4, 3);
  Matrix rho = pf * random_density(t.system, rng).matrix() * pf;
  rho /= rho.trace();
  EXPECT_LT(detail::max_abs(ch.apply(rho) - rho), 1e-12);
}

TEST(ChannelS, RecursionExpandsAsWritten) {
  const auto& t = aklt4();
  const ScheduleParams p(50.0, 4);
  Rng rng(13);
  const Matrix x = random_ginibre(81, 81, rng);
  EXPECT_LT(detail::max_abs(channel_S(t, 1, 2, p).apply(x) - channel_R(t, 1, 2).apply(x)), 1e-15);
  const double e = 1.0 / 800.0;
  const Matrix expect = (1.0 - e) / 2.0 * apply_r_kraus(x, t.pair.P, 0, 1, 4, 3, 2) +
                        (1.0 - e) / 2.0 * apply_r_kraus(x, t.pair.P, 2, 3, 4, 3, 2) + e * apply_r_kraus(x, t.pair.P, 1, 2, 4, 3, 2);
  const auto s = channel_S(t, 2, 1, p);
  EXPECT_LT(detail::max_abs(s.apply(x) - expect), 1e-12);
  double total = 0.0;
  for (const auto& b : s.branches()) total += b.probability;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(channel_S(t, 2, 2, p), InputError);
  EXPECT_THROW(channel_S(t, 3, 1, p), InputError);
}

TEST(ChannelT, FixedPointTraceAndPositivity) {
  const auto& t = aklt4();
  const ScheduleParams p(50.0, 4);
  const auto ch = channel_T(t, p);
  EXPECT_EQ(ch.branches().size(), 4u);
  EXPECT_LT(ch.trace_defect(), 1e-10);
  const auto target = DensityMatrix::from_pure(t.psi, t.system);
  EXPECT_LE(trace_distance(ch.apply(target), target), 1e-10);
  for (int r = 1; r <= 2; ++r)
    for (int c = 1; c <= (1 << (2 - r)); ++c) EXPECT_LE(trace_distance(channel_S(t, r, c, p).apply(target), target), 1e-10);
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto out = ch.apply(random_density(t.system, rng, 1 + trial % 5));
    EXPECT_NEAR(out.op().trace().real(), 1.0, 1e-10);
    EXPECT_GE(out.min_eigenvalue(), -1e-9);
  }
}

TEST(LevelErrors, TargetAndMaximallyMixed) {
  const auto& t = aklt4();
  const auto q = level_projectors(t);
  ASSERT_EQ(q.size(), 3u);
  for (double mu : level_errors(t.psi * t.psi.adjoint(), q).mu) EXPECT_NEAR(mu, 0.0, 1e-10);
  const auto mixed = level_errors(Matrix::Identity(81, 81) / 81.0, q).mu;
  EXPECT_NEAR(mixed[0], 1.0 - 4.0 / 9.0, 1e-12);
  EXPECT_NEAR(mixed[1], 1.0 - 4.0 / 81.0, 1e-12);  // open chain of 4: D^2 edge states
  EXPECT_NEAR(mixed[2], 1.0 - 1.0 / 81.0, 1e-12);
  Rng rng(15);
  const auto rho = random_density(t.system, rng);
  EXPECT_NEAR(level_errors(rho.matrix(), q).mu[2], 1.0 - fidelity(rho, t.psi), 1e-12);
}

TEST(Preparation, LevelErrorsDecreaseAfterTheirPhase) {
  const auto& t = aklt4();
  const ScheduleParams p(10.0, 4);
  PreparationOptions o;
  o.record_every = 20;
  const auto res = prepare(t, p, o);
  EXPECT_FALSE(res.stochastic);
  EXPECT_EQ(res.steps, 1600);
  for (std::size_t r = 0; r < 3; ++r) {
    const double start = r < 2 ? p.repetitions(static_cast<int>(r) + 1) : 0.0;
    for (std::size_t i = 1; i < res.records.size(); ++i) {
      if (static_cast<double>(res.records[i - 1].step) < start) continue;
      EXPECT_LE(res.records[i].mu[r], res.records[i - 1].mu[r] + 1e-12) << "level " << r + 1 << " step " << res.records[i].step;
    }
  }
  for (std::size_t i = 1; i < res.records.size(); ++i) EXPECT_GE(res.records[i].fidelity, res.records[i - 1].fidelity - 1e-12);
}

TEST(Preparation, StochasticAgreesWithDeterministic) {
  const auto& t = aklt4();
  const ScheduleParams p(50.0, 4);
  PreparationOptions o;
  o.max_steps = 300;
  o.record_every = 100;
  o.track_levels = false;
  const auto det = prepare(t, p, o);
  o.mode = IterationMode::stochastic;
  o.trajectories = 400;
  o.seed = 3;
  const auto sto = prepare(t, p, o);
  ASSERT_EQ(det.records.size(), sto.records.size());
  for (std::size_t i = 0; i < det.records.size(); ++i) {
    EXPECT_EQ(det.records[i].step, sto.records[i].step);
    EXPECT_LE(std::abs(det.records[i].fidelity - sto.records[i].fidelity), 4.0 * sto.records[i].fidelity_stderr + 1e-3);
  }
  const auto again = prepare(t, p, o);
  EXPECT_EQ(again.final_fidelity, sto.final_fidelity);
}

TEST(MpsFormat, ParsesExplicitTensorsAndPresets) {
  const auto m = io::parse_mps_string("mps 2 2 3\nA 1 : 0 0 0 1\nA 0 : 1 0 0 0\n");
  EXPECT_LT((mps_to_state(m) - mps_to_state(ghz(3))).norm(), 1e-15);
  EXPECT_EQ(io::parse_mps_string("preset aklt 4").d, 3);
  const auto c = io::parse_mps_string("# comment\nmps 2 1 2\nA 0 : (0,1)\nA 1 : 1\n");
  EXPECT_EQ(c.tensors[0](0, 0), kI);
}

TEST(MpsFormat, ErrorsNameTheLine) {
  auto line_of = [](const std::string& text) {
    try {
      io::parse_mps_string(text);
    } catch (const io::ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("mps 2 2 4\nA 0 : 1 0 0 1\nA 0 : 1 0 0 1\n"), 3);
  EXPECT_EQ(line_of("mps 2 2 4\nA 0 : 1 0 0\n"), 2);
  EXPECT_EQ(line_of("mps 2 2 4\nA 0 : 1 0 0 1\n"), 2);
  EXPECT_EQ(line_of("preset foo 4\n"), 1);
  EXPECT_EQ(line_of("preset aklt 1\n"), 1);
  EXPECT_EQ(line_of("\n\nbogus\n"), 3);
}
