#include <gtest/gtest.h>

#include <random>

#include "bellnet/ansatz.hpp"
#include "bellnet/channels.hpp"
#include "bellnet/oracle.hpp"

namespace bellnet {
namespace {

ComplexMatrix projector(const std::vector<cplx>& v) { return outer(v, v); }

DensityMatrix bell_phi_plus() { return DensityMatrix::from_matrix(projector(bell_basis::phi_plus())); }

DensityMatrix random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const std::size_t d = dim_of(n);
  ComplexMatrix a(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) a(r, c) = cplx(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho = rho * cplx(1.0 / rho.trace().real());
  return DensityMatrix::from_matrix(rho);
}

ComplexMatrix random_unitary(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.2, 3.2);
  std::vector<double> p(std::size_t((1 << (2 * m)) - 1));
  for (auto& v : p) v = u(rng);
  return gate_unitary({GateKind::ARB_UNITARY, iota_targets(m)}, p);
}

// (P(+), P(-)) of the parity of computational outcomes after u.
std::array<double, 2> parity_distribution(const ComplexMatrix& rho, const ComplexMatrix& u) {
  const ComplexMatrix r = u * rho * u.adjoint();
  std::array<double, 2> p{0.0, 0.0};
  for (std::size_t z = 0; z < r.rows(); ++z) p[std::popcount(z) & 1] += r(z, z).real();
  return p;
}

std::array<double, 2> apply_map(const StochasticMatrix2& m, const std::array<double, 2>& p) {
  return {m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]};
}

ComplexMatrix apply_all(const ComplexMatrix& x, const std::vector<ComplexMatrix>& kraus) {
  ComplexMatrix out(x.rows(), x.cols());
  for (const auto& k : kraus) out += k * x * k.adjoint();
  return out;
}

TEST(DepolarizingQubit, ZeroIsIdentityAndThreeQuartersIsFullyMixing) {
  std::mt19937_64 rng(1);
  const auto rho = random_state(1, rng);
  EXPECT_LT(apply_kraus(rho, depolarizing_qubit(0.0), {0}).matrix().max_abs_diff(rho.matrix()), 1e-15);
  for (int t = 0; t < 5; ++t) {
    const auto out = apply_kraus(random_state(1, rng), depolarizing_qubit(0.75), {0});
    EXPECT_LT(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()), 1e-14);
  }
}

TEST(DepolarizingQubit, OneSidedOnBellStateScalesCorrelations) {
  const auto out = apply_kraus(bell_phi_plus(), depolarizing_qubit(0.15), {1});
  const auto t = correlation_matrix_T(out);
  const double want[3] = {0.8, -0.8, 0.8};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(t[i][j], i == j ? want[i] : 0.0, 1e-12);
}

TEST(DepolarizingQubit, RejectsGammaOutOfRange) {
  EXPECT_THROW(depolarizing_qubit(-0.1), std::invalid_argument);
  EXPECT_THROW(depolarizing_qubit(1.5), std::invalid_argument);
  EXPECT_THROW(dephasing(1.01), std::invalid_argument);
  EXPECT_THROW(white_noise_detector(2.0), std::invalid_argument);
}

TEST(DepolarizingSource, HasSixteenOperatorsAndVisibilityForm) {
  EXPECT_EQ(depolarizing_source(0.3).size(), 16u);
  EXPECT_LT(apply_kraus(bell_phi_plus(), depolarizing_source(0.0), {0, 1}).matrix().max_abs_diff(
                bell_phi_plus().matrix()),
            1e-15);
  const auto out = apply_kraus(bell_phi_plus(), depolarizing_source(0.3), {0, 1});
  const double v = 1.0 - 16.0 * 0.3 / 15.0;
  EXPECT_NEAR(v, 0.68, 1e-15);
  const ComplexMatrix want =
      bell_phi_plus().matrix() * cplx(v) + ComplexMatrix::identity(4) * cplx((1.0 - v) / 4.0);
  EXPECT_LT(out.matrix().max_abs_diff(want), 1e-12);
}

TEST(DepolarizingSource, FifteenSixteenthsGivesMaximallyMixed) {
  std::mt19937_64 rng(2);
  const auto out = apply_kraus(random_state(2, rng), depolarizing_source(15.0 / 16.0), {0, 1});
  EXPECT_LT(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()), 1e-14);
}

TEST(Dephasing, FullDephasingOfOneSideLeavesClassicalCorrelations) {
  const auto out = apply_kraus(bell_phi_plus(), dephasing(1.0), {0});
  ComplexMatrix want(4, 4);
  want(0, 0) = 0.5;
  want(3, 3) = 0.5;
  EXPECT_LT(out.matrix().max_abs_diff(want), 1e-15);
}

TEST(Dephasing, TwoSidedHalfStrengthCoherence) {
  const auto out = apply_two_sided(bell_phi_plus(), dephasing(0.5), dephasing(0.5));
  EXPECT_NEAR(out(0, 3).real(), 0.25, 1e-15);
  EXPECT_NEAR(out(0, 0).real(), 0.5, 1e-15);
}

TEST(AmplitudeDamping, PreservesGroundAndDecaysExcited) {
  for (double g : {0.0, 0.3, 1.0}) {
    const auto out = apply_kraus(DensityMatrix::zero_state(1), amplitude_damping(g), {0});
    EXPECT_LT(out.matrix().max_abs_diff(DensityMatrix::zero_state(1).matrix()), 1e-15);
  }
  const auto one = DensityMatrix::from_matrix(ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}});
  const auto out = apply_kraus(one, amplitude_damping(0.4), {0});
  EXPECT_NEAR(out(0, 0).real(), 0.4, 1e-15);
  EXPECT_NEAR(out(1, 1).real(), 0.6, 1e-15);
}

TEST(ColoredNoise, PrintedKrausSetIsIncompleteAndChoiSetIsComplete) {
  for (double g : {0.1, 0.5, 1.0}) {
    EXPECT_FALSE(kraus_complete(colored_noise_printed(g)));
    EXPECT_TRUE(kraus_complete(colored_noise(g), 1e-10));
  }
  EXPECT_TRUE(kraus_complete(colored_noise_printed(0.0)));
}

TEST(ColoredNoise, KrausSetReproducesAffineMapOnOperatorBasis) {
  for (double g : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const auto k = colored_noise(g);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        ComplexMatrix e(4, 4);
        e(a, b) = 1.0;
        EXPECT_LT(apply_all(e, k).max_abs_diff(colored_noise_map(e, g)), 1e-10) << g;
      }
  }
}

TEST(ColoredNoise, FullStrengthGivesClassicalAnticorrelation) {
  std::mt19937_64 rng(3);
  ComplexMatrix want(4, 4);
  want(1, 1) = 0.5;
  want(2, 2) = 0.5;
  for (int t = 0; t < 3; ++t) {
    const auto out = apply_kraus(random_state(2, rng), colored_noise(1.0), {0, 1});
    EXPECT_LT(out.matrix().max_abs_diff(want), 1e-10);
  }
}

TEST(ColoredNoise, HalfStrengthOnPhiPlus) {
  const auto out = apply_kraus(bell_phi_plus(), colored_noise(0.5), {0, 1});
  const ComplexMatrix want = bell_phi_plus().matrix() * cplx(0.5) +
                             (projector(bell_basis::psi_plus()) + projector(bell_basis::psi_minus())) * cplx(0.25);
  EXPECT_LT(out.matrix().max_abs_diff(want), 1e-10);
}

TEST(Unitality, DepolarizingAndDephasingAreUnitalOthersAreNot) {
  const ComplexMatrix i2 = ComplexMatrix::identity(2), i4 = ComplexMatrix::identity(4);
  for (double g : {0.0, 0.25, 0.5, 1.0}) {
    EXPECT_LT(apply_all(i2, depolarizing_qubit(g)).max_abs_diff(i2), 1e-10);
    EXPECT_LT(apply_all(i4, depolarizing_source(g)).max_abs_diff(i4), 1e-10);
    EXPECT_LT(apply_all(i2, dephasing(g)).max_abs_diff(i2), 1e-10);
  }
  EXPECT_GT(apply_all(i2, amplitude_damping(0.5)).max_abs_diff(i2), 1e-3);
  EXPECT_GT(apply_all(i4, colored_noise(0.5)).max_abs_diff(i4), 1e-3);
}

TEST(DetectorMaps, Examples) {
  const auto w0 = white_noise_detector(0.0), b0 = biased_detector(0.0);
  EXPECT_EQ(w0[0][0], 1.0);
  EXPECT_EQ(w0[0][1], 0.0);
  EXPECT_EQ(b0[1][1], 1.0);
  const auto w1 = apply_map(white_noise_detector(1.0), {0.0, 1.0});
  EXPECT_DOUBLE_EQ(w1[0], 0.5);
  EXPECT_DOUBLE_EQ(w1[1], 0.5);
  const auto b1 = apply_map(biased_detector(1.0), {0.2, 0.8});
  EXPECT_DOUBLE_EQ(b1[0], 1.0);
  const auto w = apply_map(white_noise_detector(0.2), {1.0, 0.0});
  EXPECT_NEAR(w[0], 0.9, 1e-15);
  EXPECT_NEAR(w[1], 0.1, 1e-15);
  const auto b = apply_map(biased_detector(0.3), {0.0, 1.0});
  EXPECT_NEAR(b[0], 0.3, 1e-15);
  EXPECT_NEAR(b[1], 0.7, 1e-15);
  for (double g : {0.0, 0.37, 1.0}) {
    EXPECT_TRUE(column_stochastic(white_noise_detector(g)));
    EXPECT_TRUE(column_stochastic(biased_detector(g)));
  }
}

TEST(DetectorMaps, WhiteNoiseEqualsGlobalDepolarizing) {
  std::mt19937_64 rng(4);
  for (int m = 1; m <= 2; ++m)
    for (int trial = 0; trial < 10; ++trial) {
      const auto rho = random_state(m, rng);
      const auto u = random_unitary(m, rng);
      for (double g : {0.0, 0.25, 0.5, 1.0}) {
        const auto post = apply_map(white_noise_detector(g), parity_distribution(rho.matrix(), u));
        const double d = double(dim_of(m));
        const ComplexMatrix depol =
            rho.matrix() * cplx(1.0 - g) + ComplexMatrix::identity(dim_of(m)) * cplx(g / d);
        const auto direct = parity_distribution(depol, u);
        EXPECT_NEAR(post[0], direct[0], 1e-10);
        EXPECT_NEAR(post[1], direct[1], 1e-10);
      }
    }
}

TEST(DetectorMaps, BiasedDetectorEqualsPartialReplacer) {
  std::mt19937_64 rng(5);
  for (int m = 1; m <= 2; ++m)
    for (int trial = 0; trial < 10; ++trial) {
      const auto rho = random_state(m, rng);
      const auto u = random_unitary(m, rng);
      // A state inside the +1 parity subspace of this measurement.
      std::vector<cplx> z(dim_of(m), 0.0);
      z[dim_of(m) - 1 - (m == 1 ? 1 : 0)] = 1.0;  // |0> for m=1, |11> for m=2
      const ComplexMatrix replacement = u.adjoint() * projector(z) * u;
      for (double g : {0.0, 0.25, 0.5, 1.0}) {
        const auto post = apply_map(biased_detector(g), parity_distribution(rho.matrix(), u));
        const ComplexMatrix replaced = rho.matrix() * cplx(1.0 - g) + replacement * cplx(g);
        const auto direct = parity_distribution(replaced, u);
        EXPECT_NEAR(post[0], direct[0], 1e-10);
        EXPECT_NEAR(post[1], direct[1], 1e-10);
      }
    }
}

TEST(NoiseModel, PlacementsAndScopes) {
  const auto net = build_star(2);
  const auto uniform = build_noise_model(net, {ChannelModel::kDephasing, Placement::kUniform, {0.3}});
  EXPECT_EQ(uniform.channels.size(), 4u);
  const auto single = build_noise_model(net, {ChannelModel::kDephasing, Placement::kSingle, {0.3}});
  ASSERT_EQ(single.channels.size(), 1u);
  EXPECT_EQ(single.channels[0].targets, std::vector<int>({0}));
  const auto src = build_noise_model(net, {ChannelModel::kDepolarizingSource, Placement::kUniform, {0.1}});
  ASSERT_EQ(src.channels.size(), 2u);
  EXPECT_EQ(src.channels[1].targets, net.topology.sources[1].qubits);
  const auto det = build_noise_model(net, {ChannelModel::kWhiteNoiseDetector, Placement::kExplicit, {0.1, 0.0, 0.2}});
  EXPECT_TRUE(det.channels.empty());
  ASSERT_EQ(det.detectors.size(), 2u);
  EXPECT_EQ(det.detectors[1].node, 2u);
  EXPECT_THROW(build_noise_model(net, {ChannelModel::kDephasing, Placement::kExplicit, {0.1, 0.2}}),
               std::invalid_argument);
  EXPECT_THROW(build_noise_model(net, {ChannelModel::kDephasing, Placement::kUniform, {1.2}}), std::invalid_argument);
  EXPECT_TRUE(build_noise_model(net, {ChannelModel::kColored, Placement::kUniform, {0.0}}).empty());
}

TEST(NoiseModel, NamesRoundTrip) {
  for (const auto& name : channel_model_names()) EXPECT_EQ(to_string(parse_channel_model(name)), name);
  for (const auto& name : {"single", "uniform", "explicit"}) EXPECT_EQ(to_string(parse_placement(name)), name);
  EXPECT_THROW(parse_channel_model("bit_flip"), std::invalid_argument);
  EXPECT_THROW(parse_placement("random"), std::invalid_argument);
  EXPECT_EQ(scope_of(ChannelModel::kColored), ChannelScope::kSource);
  EXPECT_EQ(scope_of(ChannelModel::kAmplitudeDamping), ChannelScope::kQubit);
  EXPECT_EQ(scope_of(ChannelModel::kBiasedDetector), ChannelScope::kDetector);
}

}  // namespace
}  // namespace bellnet
