#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bellnet/behavior.hpp"
#include "bellnet/bell.hpp"
#include "bellnet/channels.hpp"
#include "bellnet/oracle.hpp"

namespace bellnet {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Correlator table for k exterior inputs when every source contributes an
// independent factor f_i(x_i, y); entry index is 2 * xbits + y.
std::vector<double> product_table(int k, const std::function<double(int, int, int)>& f) {
  std::vector<double> c(std::size_t{1} << (k + 1));
  for (std::size_t xb = 0; xb < (std::size_t{1} << k); ++xb)
    for (int y = 0; y < 2; ++y) {
      double v = 1.0;
      for (int i = 0; i < k; ++i) v *= f(i, int((xb >> (k - 1 - i)) & 1U), y);
      c[2 * xb + std::size_t(y)] = v;
    }
  return c;
}

// Bell-pair correlator with both sides measuring in the x-z plane.
double bell_pair(int x, int y) {
  const double a = x == 0 ? 0.0 : kPi / 2;
  const double b = y == 0 ? kPi / 4 : -kPi / 4;
  return std::cos(a - b);
}

std::vector<double> random_table(std::size_t size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> c(size);
  for (auto& v : c) v = u(rng);
  return c;
}

TEST(Iny, ConstantTables) {
  EXPECT_DOUBLE_EQ(I_ny(std::vector<double>(8, 1.0), 2, 0), 1.0);
  EXPECT_DOUBLE_EQ(I_ny(std::vector<double>(8, 1.0), 2, 1), 0.0);
  EXPECT_DOUBLE_EQ(I_ny(std::vector<double>(16, 0.0), 3, 0), 0.0);
  EXPECT_THROW(I_ny(std::vector<double>(6, 0.0), 2, 0), std::invalid_argument);
  EXPECT_THROW(I_ny(std::vector<double>(8, 0.0), 2, 2), std::invalid_argument);
}

TEST(Iny, OptimalStarObservables) {
  for (int n = 1; n <= 4; ++n) {
    const auto c = product_table(n, [](int, int x, int y) { return bell_pair(x, y); });
    EXPECT_NEAR(std::abs(I_ny(c, n, 0)), std::pow(2.0, -n / 2.0), 1e-12);
    EXPECT_NEAR(std::abs(I_ny(c, n, 1)), std::pow(2.0, -n / 2.0), 1e-12);
    EXPECT_NEAR(star_score(c, n).value, kSqrt2, 1e-12) << n;
  }
}

TEST(Chsh, NoiselessOptimum) {
  const auto c = product_table(1, [](int, int x, int y) { return bell_pair(x, y); });
  const auto s = chsh_score(c);
  EXPECT_NEAR(s.value, 2 * kSqrt2, 1e-12);
  EXPECT_EQ(s.classical_bound, 2.0);
  EXPECT_NEAR(s.quantum_bound, 2 * kSqrt2, 1e-15);
  const auto h = chsh_score(c, true);
  EXPECT_NEAR(h.value, kSqrt2, 1e-12);
  EXPECT_EQ(h.classical_bound, 1.0);
}

TEST(Chsh, DeterministicStrategiesAreClassical) {
  for (int s = 0; s < 16; ++s) {
    const int a[2] = {(s & 1) ? -1 : 1, (s & 2) ? -1 : 1};
    const int b[2] = {(s & 4) ? -1 : 1, (s & 8) ? -1 : 1};
    const std::vector<double> c{double(a[0] * b[0]), double(a[0] * b[1]), double(a[1] * b[0]), double(a[1] * b[1])};
    EXPECT_LE(chsh_score(c).value, 2.0 + 1e-12);
  }
}

TEST(Chsh, TwoSidedDephasingOptimalMeasurements) {
  const double g = 0.5;
  const auto rho = apply_two_sided(pure_density(phi_plus_ket()), dephasing(g), dephasing(g));
  // A in {Z, X}; B along angle +-beta in the x-z plane, tan(beta) = T_xx / T_zz.
  const double beta = std::atan2((1 - g), 1.0);
  auto obs = [](double angle) { return pauli::Z() * cplx(std::cos(angle)) + pauli::X() * cplx(std::sin(angle)); };
  std::vector<double> c;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const ComplexMatrix op = kron(obs(x == 0 ? 0.0 : kPi / 2), obs(y == 0 ? beta : -beta));
      c.push_back((rho.matrix() * op).trace().real());
    }
  EXPECT_NEAR(chsh_score(c).value, 2 * std::sqrt(1.25), 1e-12);
  EXPECT_NEAR(2 * std::sqrt(1.25), 2.2361, 1e-4);
}

TEST(Star, AllZeroTableScoresZero) { EXPECT_DOUBLE_EQ(star_score(std::vector<double>(16, 0.0), 3).value, 0.0); }

TEST(Star, ClassicalSourcePartialStrategy) {
  // Source 0 is |00> measured with A = Z or X and B = Z: correlator 1 - x.
  const auto c = product_table(3, [](int i, int x, int y) { return i == 0 ? double(1 - x) : bell_pair(x, y); });
  EXPECT_NEAR(star_score(c, 3).value, std::pow(kSqrt2, 2.0 / 3.0), 1e-12);
  EXPECT_NEAR(star_score(c, 3).value, 1.2599, 1e-4);
  EXPECT_NEAR(star_score(c, 3).value, classical_source_star_score(3, 1), 1e-12);
}

TEST(Chain, NoiselessOptimum) {
  // Exterior slots (x1, x2): each exterior source pairs with its interior neighbour.
  const auto c = product_table(2, [](int, int x, int y) { return bell_pair(x, y); });
  EXPECT_NEAR(chain_score(c, 3).value, kSqrt2, 1e-12);
}

TEST(Chain, ClassicalInteriorSourceStillReachesRootTwo) {
  const auto net = build_network("chain:3");
  auto a = make_ansatz(net, "phi_plus", "local_ry");
  a.preps[1] = make_fixed_prep(DensityMatrix::zero_state(2), "classical_00");
  const NetworkSimulator sim(a, {});
  // A1: {0, pi/2}; A2: {0, pi/2}; B1 = (q1, q2), B2 = (q3, q4): the qubits facing
  // the exterior sources take +-pi/4, the classical ones stay in Z.
  const std::vector<double> v{0, kPi / 2, 0, kPi / 2, kPi / 4, 0, -kPi / 4, 0, 0, kPi / 4, 0, -kPi / 4};
  ASSERT_EQ(v.size(), sim.num_parameters());
  EXPECT_NEAR(chain_score(sim.fast_correlators(v).values, 3).value, kSqrt2, 1e-12);
}

TEST(Chain, UniformSourceDepolarizingScaling) {
  for (int n = 2; n <= 4; ++n) {
    const double v = 0.8;
    const double vn = std::pow(v, n);
    // Visibility scales the whole chain correlator by v^n.
    const auto c = product_table(2, [&](int i, int x, int y) { return bell_pair(x, y) * (i == 0 ? vn : 1.0); });
    EXPECT_NEAR(chain_score(c, n).value, kSqrt2 * std::pow(v, n / 2.0), 1e-12);
  }
}

TEST(Cost, IsNegatedScore) {
  EXPECT_DOUBLE_EQ(cost(2 * kSqrt2), -2 * kSqrt2);
  EXPECT_DOUBLE_EQ(cost(0.0), 0.0);
  EXPECT_DOUBLE_EQ(cost(1.0), -1.0);
  EXPECT_DOUBLE_EQ(cost(BellScore{1.5, "x", 1, 1}), -1.5);
}

TEST(Invariants, StarTwoEqualsChainTwoExactly) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto c = random_table(8, rng);
    EXPECT_EQ(star_score(c, 2).value, chain_score(c, 2).value);
  }
}

TEST(Invariants, OneStarAgainstHalfChsh) {
  // |I0| + |I1| >= |I0 + I1| = CHSH / 2, with equality when I0 and I1 share a sign.
  std::mt19937_64 rng(2);
  int equal_cases = 0;
  for (int t = 0; t < 200; ++t) {
    const auto c = random_table(4, rng);
    const double star = star_score(c, 1).value;
    const double half = chsh_score(c, true).value;
    EXPECT_GE(star, half - 1e-12);
    if (I_ny(c, 1, 0) * I_ny(c, 1, 1) >= 0) {
      EXPECT_NEAR(star, half, 1e-12);
      ++equal_cases;
    }
  }
  EXPECT_GT(equal_cases, 0);
}

TEST(Invariants, GlobalSignFlipForEvenN) {
  std::mt19937_64 rng(3);
  for (int n : {2, 4}) {
    const auto c = random_table(std::size_t{1} << (n + 1), rng);
    auto flipped = c;
    for (auto& v : flipped) v = -v;
    EXPECT_NEAR(star_score(c, n).value, star_score(flipped, n).value, 1e-15);
    const auto d = random_table(8, rng);
    auto dflip = d;
    for (auto& v : dflip) v = -v;
    EXPECT_NEAR(chain_score(d, n).value, chain_score(dflip, n).value, 1e-15);
  }
}

TEST(Invariants, DeterministicStrategiesNeverViolate) {
  // Exterior node i outputs a_i(x_i) and the central node outputs b(y).
  for (int n = 1; n <= 3; ++n) {
    const int ext_bits = 2 * n, central_bits = 2;
    double best = 0.0;
    for (int s = 0; s < (1 << (ext_bits + central_bits)); ++s) {
      std::vector<double> c(std::size_t{1} << (n + 1));
      for (std::size_t xb = 0; xb < (std::size_t{1} << n); ++xb)
        for (int y = 0; y < 2; ++y) {
          double v = ((s >> (ext_bits + y)) & 1) ? -1.0 : 1.0;
          for (int i = 0; i < n; ++i) {
            const int xi = int((xb >> (n - 1 - i)) & 1U);
            v *= ((s >> (2 * i + xi)) & 1) ? -1.0 : 1.0;
          }
          c[2 * xb + std::size_t(y)] = v;
        }
      best = std::max(best, star_score(c, n).value);
      if (n == 2) best = std::max(best, chain_score(c, 3).value);
    }
    EXPECT_LE(best, 1.0 + 1e-9) << n;
  }
}

TEST(ScoreWithGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (const auto& id : {"chsh", "bilocal", "star:3", "chain:3"}) {
    const auto ineq = Inequality::parse(id);
    const auto c = random_table(std::size_t{1} << (ineq.exterior_slots() + 1), rng);
    const auto g = score_with_gradient(ineq, c);
    EXPECT_NEAR(g.value, score(ineq, c).value, 1e-15);
    for (std::size_t i = 0; i < c.size(); ++i) {
      auto up = c, dn = c;
      up[i] += 1e-6;
      dn[i] -= 1e-6;
      const double fd = (score(ineq, up).value - score(ineq, dn).value) / 2e-6;
      EXPECT_NEAR(g.d_correlators[i], fd, 1e-6) << id << " entry " << i;
    }
  }
}

TEST(ScoreWithGradient, ClampsNearZero) {
  EXPECT_EQ(root_abs_derivative(1e-10, 2), 0.0);
  EXPECT_EQ(root_abs_derivative(-5e-10, 3), 0.0);
  EXPECT_NEAR(root_abs_derivative(0.25, 2), 1.0, 1e-15);
  EXPECT_NEAR(root_abs_derivative(-0.25, 2), -1.0, 1e-15);
}

TEST(Inequality, ParseBoundsAndNetworkChecks) {
  EXPECT_EQ(Inequality::parse("chsh").kind, InequalityKind::kChsh);
  EXPECT_EQ(Inequality::parse("bilocal").n, 2);
  EXPECT_EQ(Inequality::parse("star:4").exterior_slots(), 4);
  EXPECT_EQ(Inequality::parse("chain:5").exterior_slots(), 2);
  EXPECT_THROW(Inequality::parse("chain:1"), std::invalid_argument);
  EXPECT_THROW(Inequality::parse("tree:3"), std::invalid_argument);
  EXPECT_NEAR(Inequality::parse("star:3").quantum_bound(), kSqrt2, 1e-15);
  EXPECT_EQ(Inequality::parse("chain:3").classical_bound(), 1.0);
  EXPECT_NO_THROW(Inequality::parse("chain:2").check_network(build_network("bilocal")));
  EXPECT_NO_THROW(Inequality::parse("bilocal").check_network(build_network("chain:2")));
  EXPECT_THROW(Inequality::parse("star:3").check_network(build_network("chain:3")), std::invalid_argument);
  EXPECT_THROW(Inequality::parse("chsh").check_network(build_network("bilocal")), std::invalid_argument);
  EXPECT_EQ(Inequality::for_network(build_network("chain:4")).id(), "chain:4");
  EXPECT_EQ(Inequality::for_network(build_network("chsh")).id(), "chsh");
}

}  // namespace
}  // namespace bellnet
