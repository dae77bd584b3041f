#include "test_support.hpp"

using namespace okt;

TEST(Dynamics, QubitPrecessionClosedForm) {
  // sigma_x flow on diag(0.7, 0.3): rho_00(t) = 0.5 + 0.2 cos(2t)
  auto p = qubit(0.7);
  for (double t : {0.1, 0.5, 1.3}) {
    auto q = evolve(p, sigma_x(), t);
    EXPECT_NEAR(q.rho().matrix()(0, 0).real(), 0.5 + 0.2 * std::cos(2 * t), 1e-14);
    EXPECT_NEAR(q.rho().matrix()(0, 1).imag(), 0.2 * std::sin(2 * t), 1e-14);
  }
}

TEST(Dynamics, ZeroTimeIsIdentity) {
  auto smp = draw(61, 0);
  auto q = evolve(smp.p, smp.a, 0.0);
  EXPECT_TRUE(q.same_point(smp.p));
}

TEST(Dynamics, SpectrumPreserved) {
  for (int s = 0; s < 100; ++s) {
    auto smp = draw(62, s);
    auto tr = trajectory(smp.p, smp.a, 2.0, 6);
    ASSERT_EQ(tr.points.size(), 6u);
    for (const auto& q : tr.points) {
      ASSERT_EQ(q.spectrum().mults, smp.p.spectrum().mults);
      for (std::size_t j = 0; j < q.spectrum().values.size(); ++j)
        EXPECT_NEAR(q.spectrum().values[j], smp.p.spectrum().values[j], 1e-10);
    }
  }
}

TEST(Dynamics, FlowComposes) {
  for (int s = 0; s < 100; ++s) {
    auto smp = draw(63, s);
    auto lhs = evolve(evolve(smp.p, smp.a, 0.4), smp.a, 0.7);
    auto rhs = evolve(smp.p, smp.a, 1.1);
    EXPECT_LT(max_abs(lhs.rho().matrix() - rhs.rho().matrix()), 1e-10);
  }
}

TEST(Dynamics, EhrenfestSecondOrder) {
  Spectrum spec{{0.4, 0.2, 0.1}, {1, 2, 2}};
  auto p = random_density(spec, std::uint64_t{3});
  auto a = random_hermitian(5, std::uint64_t{4});
  auto h = random_hermitian(5, std::uint64_t{5});
  auto sw = step_halving([&](const Config& c) { return ehrenfest_check(a, h, p, c); }, Config{}, 1e-3, 1e-5);
  for (double q : sw.ratios) EXPECT_NEAR(q, 4.0, 0.1);
  EXPECT_LE(sw.residuals.back(), 1e-6);
}

TEST(Dynamics, EhrenfestRespectsHbar) {
  Config cfg;
  cfg.hbar = 0.3;
  auto smp = draw(64, 2);
  EXPECT_LE(ehrenfest_check(smp.a, smp.b, smp.p, cfg), 1e-6);
}

TEST(Dynamics, TrajectoryTimes) {
  auto p = qubit(0.7);
  auto tr = trajectory(p, sigma_z(), 1.0, 5);
  EXPECT_EQ(tr.times, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  auto single = trajectory(p, sigma_z(), 1.0, 1);
  EXPECT_EQ(single.times, (std::vector<double>{0.0}));
  try {
    trajectory(p, sigma_z(), 1.0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Dynamics, DriftDetection) {
  Spectrum a{{0.7, 0.3}, {1, 1}}, b{{0.7, 0.29}, {1, 1}}, c{{1.0}, {2}};
  Config cfg;
  EXPECT_NO_THROW(detail::require_same_spectrum(a, a, cfg));
  for (const auto& other : {b, c}) {
    try {
      detail::require_same_spectrum(a, other, cfg);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::DegenerateDrift);
    }
  }
}
