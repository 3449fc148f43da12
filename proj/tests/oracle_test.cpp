#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numbers>
#include <random>

#include "bellnet/oracle.hpp"

namespace bellnet {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

DensityMatrix bell() { return pure_density(phi_plus_ket()); }

DensityMatrix werner(double v) {
  return DensityMatrix::unchecked(2, bell().matrix() * cplx(v) + ComplexMatrix::identity(4) * cplx((1 - v) / 4));
}

DensityMatrix random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) a(r, c) = cplx(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  return DensityMatrix::from_matrix(rho * cplx(1.0 / rho.trace().real()));
}

// Horodecki value computed with Eigen from scratch.
double eigen_horodecki(const DensityMatrix& rho) {
  const Eigen::Matrix2cd p[3] = {(Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
                                 (Eigen::Matrix2cd() << 0, cplx(0, -1), cplx(0, 1), 0).finished(),
                                 (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()};
  Eigen::Matrix4cd r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = rho(std::size_t(i), std::size_t(j));
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::Matrix4cd k;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) k.block<2, 2>(2 * a, 2 * b) = p[i](a, b) * p[j];
      t(i, j) = (r * k).trace().real();
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t);
  return 2.0 * std::sqrt(es.eigenvalues()(2) + es.eigenvalues()(1));
}

CurveQuery query(ChannelModel m, NetworkKind k, int n, Placement p, double g) {
  CurveQuery q;
  q.model = m;
  q.kind = k;
  q.n = n;
  q.placement = p;
  q.gammas = {g};
  return q;
}

TEST(CorrelationMatrix, Examples) {
  const auto t = correlation_matrix_T(bell());
  const double diag[3] = {1, -1, 1};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(t[i][j], i == j ? diag[i] : 0.0, 1e-15);
  const auto z = correlation_matrix_T(DensityMatrix::maximally_mixed(2));
  for (const auto& row : z)
    for (double v : row) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_THROW(correlation_matrix_T(DensityMatrix::maximally_mixed(1)), std::invalid_argument);
}

TEST(CorrelationMatrix, TwoSidedAmplitudeDamping) {
  const double g1 = 0.2, g2 = 0.45;
  const auto t = correlation_matrix_T(apply_two_sided(bell(), amplitude_damping(g1), amplitude_damping(g2)));
  const double s = std::sqrt((1 - g1) * (1 - g2));
  EXPECT_NEAR(t[0][0], s, 1e-14);
  EXPECT_NEAR(t[1][1], -s, 1e-14);
  EXPECT_NEAR(t[2][2], 1 - g1 - g2 + 2 * g1 * g2, 1e-14);
}

TEST(Horodecki, Examples) {
  EXPECT_NEAR(horodecki_max_chsh(bell()), 2 * kSqrt2, 1e-12);
  const auto one_sided = apply_kraus(bell(), depolarizing_qubit(0.15), {1});
  EXPECT_NEAR(horodecki_max_chsh(one_sided), 2 * std::sqrt(2 * 0.64), 1e-12);
  EXPECT_NEAR(horodecki_max_chsh(one_sided), 2.2627, 1e-4);
  for (double g : {0.1, 0.5, 0.9}) {
    const auto d = apply_two_sided(bell(), dephasing(g), dephasing(g));
    EXPECT_NEAR(horodecki_max_chsh(d), 2 * std::sqrt(1 + (1 - g) * (1 - g)), 1e-12);
  }
}

TEST(Horodecki, MatchesEigenOnRandomStates) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto rho = random_state(rng);
    EXPECT_NEAR(horodecki_max_chsh(rho), eigen_horodecki(rho), 1e-10);
  }
}

TEST(MaxStar, Examples) {
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(max_star_score(std::vector<DensityMatrix>(std::size_t(n), bell()), n), kSqrt2, 1e-12);
  EXPECT_NEAR(max_star_score({werner(0.68), werner(0.68)}, 2), kSqrt2 * 0.68, 1e-12);
  const auto classical = DensityMatrix::zero_state(2);
  EXPECT_NEAR(max_star_score({classical, bell(), bell()}, 3), 1.0, 1e-12);
  EXPECT_LT(max_star_score({classical, bell(), bell()}, 3), classical_source_star_score(3, 1));
  EXPECT_THROW(max_star_score({bell()}, 2), std::invalid_argument);
}

TEST(MaxStar, IdenticalSourcesEqualProductOfChshValues) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 4; ++n) {
    const auto rho = random_state(rng);
    const double s = horodecki_max_chsh(rho);
    const double want = std::pow(std::pow(s, n) / std::pow(2.0, n), 1.0 / n);
    EXPECT_NEAR(max_star_score(std::vector<DensityMatrix>(std::size_t(n), rho), n), want, 1e-12);
  }
}

TEST(MaxChain, Examples) {
  for (int n = 2; n <= 4; ++n) {
    EXPECT_NEAR(max_chain_score(std::vector<DensityMatrix>(std::size_t(n), bell()), n), kSqrt2, 1e-12);
    const double v = 0.8;
    EXPECT_NEAR(max_chain_score(std::vector<DensityMatrix>(std::size_t(n), werner(v)), n),
                kSqrt2 * std::pow(v, n / 2.0), 1e-12);
  }
  const auto classical = DensityMatrix::zero_state(2);
  EXPECT_NEAR(max_chain_score({bell(), classical, classical, bell()}, 4), 1.0, 1e-12);
  EXPECT_THROW(max_chain_score({bell()}, 1), std::invalid_argument);
}

TEST(ClassicalSources, Examples) {
  EXPECT_NEAR(classical_source_star_score(3, 0), kSqrt2, 1e-15);
  EXPECT_NEAR(classical_source_star_score(3, 3), 1.0, 1e-15);
  EXPECT_NEAR(classical_source_star_score(3, 1), std::cbrt(2.0), 1e-15);
  EXPECT_NEAR(classical_source_star_score(3, 1), 1.2599, 1e-4);
  EXPECT_THROW(classical_source_star_score(2, 3), std::invalid_argument);
}

TEST(Curve, SourceDepolarizingMatchesStateFormulas) {
  for (double g : {0.0, 0.1, 0.3, 0.5}) {
    const double v = 1 - 16 * g / 15;
    const auto rho = apply_kraus(bell(), depolarizing_source(g), {0, 1});
    for (int n = 2; n <= 4; ++n) {
      const std::vector<DensityMatrix> src(std::size_t(n), rho);
      const double star = curve(query(ChannelModel::kDepolarizingSource, NetworkKind::kStar, n, Placement::kUniform, g));
      EXPECT_NEAR(star, max_star_score(src, n), 1e-12);
      EXPECT_NEAR(star, kSqrt2 * v, 1e-12);
      const double chain =
          curve(query(ChannelModel::kDepolarizingSource, NetworkKind::kChain, n, Placement::kUniform, g));
      EXPECT_NEAR(chain, max_chain_score(src, n), 1e-12);
    }
  }
}

TEST(Curve, WhiteNoiseDetectorStar) {
  for (int n = 1; n <= 4; ++n)
    for (double g : {0.0, 0.2, 0.6}) {
      EXPECT_NEAR(curve(query(ChannelModel::kWhiteNoiseDetector, NetworkKind::kStar, n, Placement::kUniform, g)),
                  kSqrt2 * std::pow(1 - g, (n + 1.0) / n), 1e-12);
    }
}

TEST(Curve, Dephasing) {
  const double g = 0.5;
  EXPECT_NEAR(curve(query(ChannelModel::kDephasing, NetworkKind::kStar, 2, Placement::kUniform, g)), std::sqrt(1.25),
              1e-12);
  EXPECT_NEAR(curve(query(ChannelModel::kDephasing, NetworkKind::kStar, 3, Placement::kUniform, g)), 1.11803398875,
              1e-11);
  for (int n = 1; n <= 4; ++n) {
    const double single = curve(query(ChannelModel::kDephasing, NetworkKind::kStar, n, Placement::kSingle, 0.3));
    EXPECT_NEAR(single, std::pow(std::sqrt(1 + (1 - 0.3)) * std::pow(2.0, (n - 1) / 2.0), 1.0 / n), 1e-12);
    // Same value from the product of per-source CHSH optima.
    const double noisy = horodecki_max_chsh(apply_kraus(bell(), dephasing(0.3), {0}));
    const double bound = std::pow(noisy * std::pow(2 * kSqrt2, n - 1) / std::pow(2.0, n), 1.0 / n);
    EXPECT_NEAR(single, bound, 1e-12);
  }
}

TEST(Curve, ColoredStarMatchesHorodeckiOfNoisySources) {
  for (double g : {0.0, 0.4, 1.0}) {
    const auto rho = apply_kraus(bell(), colored_noise(g), {0, 1});
    auto q = query(ChannelModel::kColored, NetworkKind::kStar, 2, Placement::kUniform, g);
    EXPECT_NEAR(curve(q), max_star_score({rho, rho}, 2), 1e-10);
    q.n = 1;
    EXPECT_NEAR(curve(q), 0.5 * horodecki_max_chsh(rho), 1e-12);
  }
}

TEST(Curve, UnsupportedCombinationsAreRejected) {
  EXPECT_THROW(curve(query(ChannelModel::kAmplitudeDamping, NetworkKind::kStar, 2, Placement::kUniform, 0.2)),
               UnsupportedCurve);
  EXPECT_THROW(curve(query(ChannelModel::kBiasedDetector, NetworkKind::kStar, 1, Placement::kUniform, 0.2)),
               UnsupportedCurve);
  EXPECT_THROW(curve(query(ChannelModel::kDepolarizingQubit, NetworkKind::kChain, 3, Placement::kUniform, 0.2)),
               UnsupportedCurve);
  auto explicit_dephasing = query(ChannelModel::kDephasing, NetworkKind::kStar, 2, Placement::kExplicit, 0.2);
  explicit_dephasing.gammas = {0.1, 0.2, 0.3, 0.4};
  EXPECT_THROW(curve(explicit_dephasing), UnsupportedCurve);
}

TEST(AmplitudeDampingBreaking, ExamplesAndBoundary) {
  EXPECT_FALSE(amplitude_damping_breaking(0.0, 0.0));
  EXPECT_TRUE(amplitude_damping_breaking(1.0, 0.0));
  const double g0 = 1 - 1 / kSqrt2;
  EXPECT_FALSE(amplitude_damping_breaking(g0 - 1e-9, g0 - 1e-9));
  EXPECT_TRUE(amplitude_damping_breaking(g0 + 1e-9, g0 + 1e-9));
  EXPECT_FALSE(amplitude_damping_breaking(0.2928, 0.2928));
  EXPECT_TRUE(amplitude_damping_breaking(0.29290, 0.30));
  EXPECT_THROW(amplitude_damping_breaking(1.2, 0.0), std::invalid_argument);
}

TEST(GridSearch, IdentityChannels) {
  const auto id = std::vector<ComplexMatrix>{ComplexMatrix::identity(2)};
  EXPECT_NEAR(maxent_gridsearch_oracle(id, id).value, 2 * kSqrt2, 1e-4);
}

TEST(GridSearch, AmplitudeDampingBreaksMaximallyEntangledStates) {
  const auto r = maxent_gridsearch_oracle(amplitude_damping(0.35), amplitude_damping(0.35));
  EXPECT_LE(r.value, 2 + 1e-6);
  EXPECT_GT(r.evaluations, 24u * 24u * 24u);
}

TEST(GridSearch, TwoSidedDephasing) {
  EXPECT_NEAR(maxent_gridsearch_oracle(dephasing(0.5), dephasing(0.5)).value, 2 * std::sqrt(1.25), 1e-4);
}

TEST(GridSearch, FamilyIsUnitary) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 6.3);
  for (int t = 0; t < 20; ++t) EXPECT_TRUE(maxent_family_unitary(u(rng), u(rng), u(rng)).is_unitary(1e-12));
}

}  // namespace
}  // namespace bellnet
