#include "test_support.hpp"

using namespace okt;

TEST(Involutivity, StrictlyUpperBlocksCloseUnderBracket) {
  for (int s = 0; s < 100; ++s) {
    auto smp = draw(41, s);
    auto r = involutivity_check(smp.p, 5, static_cast<std::uint64_t>(s));
    EXPECT_TRUE(r.passed) << r.max_residual;
    EXPECT_EQ(r.samples, 5);
    EXPECT_LE(r.max_residual, 1e-12);
  }
}

TEST(Nondegeneracy, MetricDominatesGapFloor) {
  for (int s = 0; s < 100; ++s) {
    auto smp = draw(42, s);
    auto r = nondegeneracy_check(smp.p, 5, static_cast<std::uint64_t>(s));
    EXPECT_TRUE(r.passed) << r.max_residual;
  }
}

TEST(Nondegeneracy, SingleClusterIsVacuous) {
  auto p = orbit_point(make_hermitian(Matrix(Matrix::Identity(4, 4) / 4.0)));
  auto r = nondegeneracy_check(p, 3, 0);
  EXPECT_EQ(r.max_residual, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(Nijenhuis, VanishesOnQubitAtDiagonalPoint) {
  auto p = qubit(0.7);
  EXPECT_EQ(nijenhuis_fd(sigma_x(), sigma_y(), p), 0.0);
  EXPECT_EQ(closedness_check(sigma_x(), sigma_y(), sigma_z(), p), 0.0);
}

TEST(Nijenhuis, SmallAtDefaultStep) {
  for (int s = 0; s < 10; ++s) {
    auto smp = draw(43, s, 3, 6);
    EXPECT_LE(nijenhuis_fd(smp.a, smp.b, smp.p), 1e-6);
    EXPECT_LE(closedness_check(smp.a, smp.b, smp.c, smp.p), 1e-6);
  }
}

TEST(Nijenhuis, SecondOrderConvergence) {
  // Fixed 5-dimensional instance with spectrum (0.4, 0.2, 0.1), mults (1, 2, 2).
  Spectrum spec{{0.4, 0.2, 0.1}, {1, 2, 2}};
  auto p = random_density(spec, std::uint64_t{7});
  auto a = random_hermitian(5, std::uint64_t{8});
  auto b = random_hermitian(5, std::uint64_t{9});
  auto c = random_hermitian(5, std::uint64_t{10});
  auto n = step_halving([&](const Config& cfg) { return nijenhuis_fd(a, b, p, cfg); }, Config{}, 1e-3, 1e-5);
  auto d = step_halving([&](const Config& cfg) { return closedness_check(a, b, c, p, cfg); }, Config{}, 1e-3,
                        1e-5);
  ASSERT_EQ(n.steps.size(), 7u);
  EXPECT_DOUBLE_EQ(n.steps.front(), 1e-3);
  EXPECT_GE(n.steps.back(), 1e-5);
  for (double q : n.ratios) EXPECT_NEAR(q, 4.0, 0.1);
  for (double q : d.ratios) EXPECT_NEAR(q, 4.0, 0.1);
  EXPECT_LE(n.residuals.back(), 1e-6);
  EXPECT_LE(d.residuals.back(), 1e-6);
}

TEST(Nijenhuis, NonzeroFieldsGiveNonzeroTruncation) {
  // The finite-difference residual is a genuine truncation error, not a
  // structural zero: it grows with the step.
  auto smp = draw(44, 1, 4, 4);
  Config coarse;
  coarse.fd_step = 1e-2;
  EXPECT_GT(nijenhuis_fd(smp.a, smp.b, smp.p, coarse), nijenhuis_fd(smp.a, smp.b, smp.p));
}

TEST(Suite, RatioDeviationIgnoresRoundingFloor) {
  StepHalving flat{{1e-3, 5e-4}, {1e-20, 3e-20}, {1.0 / 3}};
  EXPECT_EQ(detail::ratio_deviation(flat), 0.0);
  StepHalving clean{{1e-3, 5e-4, 2.5e-4}, {4e-8, 1e-8, 2.5e-9}, {4, 4}};
  EXPECT_NEAR(detail::ratio_deviation(clean), 0.0, 1e-12);
  StepHalving first_order{{1e-3, 5e-4}, {2e-8, 1e-8}, {2}};
  EXPECT_NEAR(detail::ratio_deviation(first_order), 2.0, 1e-12);
}

TEST(CheckReport, KeepsWorstInstance) {
  CheckReport r{"x", 0, 0, 1.0, true, json::object()};
  r.record(0.5, [] { return json{{"id", 1}}; });
  r.record(0.2, [] { return json{{"id", 2}}; });
  r.record(2.0, [] { return json{{"id", 3}}; });
  EXPECT_EQ(r.samples, 3);
  EXPECT_EQ(r.max_residual, 2.0);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.worst_case["id"], 3);
  auto j = check_report_to_json(r);
  for (const char* key : {"check", "max_residual", "samples", "tolerance", "passed", "worst_case"})
    EXPECT_TRUE(j.contains(key)) << key;
}
