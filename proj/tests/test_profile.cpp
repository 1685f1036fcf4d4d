#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <froth/errors.hpp>
#include <froth/model.hpp>
#include <froth/partition.hpp>
#include <froth/profile.hpp>

using namespace froth;

TEST_CASE("average_over") {
  const double m = default_params().m_beta;
  const GridProfile c = GridProfile::constant(10.0, 0.125, m);
  CHECK(average_over(c, {2.0, 5.5}) == doctest::Approx(m).epsilon(1e-15));
  const double L = 8.0;
  const GridProfile sq = GridProfile::from_function(
      L, 0.125, [&](double x) { return std::sin(2 * M_PI * x / L) >= 0 ? 1.0 : -1.0; });
  CHECK(std::abs(average_over(sq, {0.0, L})) < 1e-15);
  const GridProfile saw = GridProfile::from_function(L, 0.125, [&](double x) { return 2 * x / L - 1; });
  CHECK(std::abs(average_over(saw, {0.0, L})) <= 0.125 / L);
  CHECK_THROWS_AS(average_over(c, {0.01, 1.0}), AlignmentError);
}

TEST_CASE("block types") {
  const double m = 0.957504;
  CHECK(block_type(0.95 * m, m) == BlockType::plus);
  CHECK(block_type(0.0, m) == BlockType::zero);
  CHECK(block_type(-0.9 * m, m) == BlockType::minus);
  CHECK(block_type(0.9 * m, m) == BlockType::plus);
  CHECK(block_type(0.89 * m, m) == BlockType::zero);
}

TEST_CASE("alpha_L reproduced by direct search") {
  for (double L : {50.0, 73.25, 100.0, 314.5}) {
    for (double delta : {0.1, 0.2, 0.4}) {
      const double g = 0.02;
      const double a = alpha_L(L, delta, g);
      // smallest alpha >= 1 with (L / alpha) gamma^delta in N: scan integers
      const double base = L * std::pow(g, delta);
      double ref = 0;
      for (long n = static_cast<long>(std::floor(base)); n >= 1; --n)
        if (base / n >= 1.0) {
          ref = base / n;
          break;
        }
      CHECK(a == doctest::Approx(ref).epsilon(1e-14));
      const auto P = regular_partition(L, delta, g);
      const double M = L / a * std::pow(g, delta);
      CHECK(std::abs(M - std::round(M)) < 1e-9);
      CHECK(P.size() == static_cast<std::size_t>(std::llround(M)));
      CHECK(P.lines.front() == 0.0);
      CHECK(std::abs(P.lines.back() - L) <= 1e-12 * L);
      for (std::size_t i = 0; i < P.size(); ++i)
        CHECK(P.block(i).length() == doctest::Approx(a * std::pow(g, -delta)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(regular_partition(1.0, 0.4, 0.01), DomainTooShort);
}

TEST_CASE("snapping keeps a tiling") {
  const auto P = snap_to_grid(regular_partition(73.25, 0.2, 0.02), 0.125);
  for (std::size_t i = 0; i + 1 < P.lines.size(); ++i) {
    CHECK(P.lines[i + 1] > P.lines[i]);
    CHECK(std::abs(P.lines[i] / 0.125 - std::round(P.lines[i] / 0.125)) < 1e-12);
  }
  CHECK(P.lines.back() == 73.25);
}

TEST_CASE("coarse version") {
  const ModelParams p = default_params(0.02);
  const double m = p.m_beta, g = 0.02;
  const GridProfile c = GridProfile::constant(40.0, 0.125, m);
  const GridProfile cc = coarse_version(c, 0.2, g);
  for (double v : cc.samples()) CHECK(v == doctest::Approx(m).epsilon(1e-15));

  const double h = 20.0, L = 80.0;
  const GridProfile sq = StepProfile::alternating(h, L, m).to_grid(0.125);
  const GridProfile cs = coarse_version(sq, 0.1, g);
  CHECK(std::abs(average_over(cs, {0, L}) - average_over(sq, {0, L})) < 1e-14);
  const auto P = regular_partition(L, 0.1, g);
  for (std::size_t i = 0; i < P.size(); ++i) {
    const Interval b = P.block(i);
    const bool crosses = std::floor(b.a / h) != std::floor((b.b - 1e-9) / h);
    if (!crosses) CHECK(std::abs(std::abs(average_over(cs, {std::round(b.a * 8) / 8, std::round(b.b * 8) / 8})) - m) < 1e-14);
  }
  // idempotent
  const GridProfile twice = coarse_version(cs, 0.1, g);
  for (std::size_t i = 0; i < cs.size(); ++i) REQUIRE(twice[i] == doctest::Approx(cs[i]).epsilon(1e-14));
  CHECK_THROWS_AS(coarse_version(GridProfile::constant(1.0, 0.125, m), 0.4, 0.001), DomainTooShort);
}

TEST_CASE("step profiles") {
  const StepProfile s({0.0, 1.0, 3.0, 4.0}, {0.9, -0.95, 0.97});
  CHECK(s.pieces() == 3);
  CHECK(s.L() == 4.0);
  CHECK(s.mean() == doctest::Approx((0.9 - 1.9 + 0.97) / 4));
  CHECK(s.min_abs_value() == doctest::Approx(0.9));
  CHECK(s.in_K(0.9) == (s.min_abs_value() >= 0.9));
  CHECK_FALSE(s.in_K(0.91));
  const auto H = sign_intervals(s, true);
  REQUIRE(H.size() == 2);  // first and last merge across the wrap
  CHECK(H[1].length() + H[0].length() == doctest::Approx(4.0));
  CHECK(sign_intervals(s, false).size() == 3);
  const StepProfile a = StepProfile::alternating(2.0, 8.0, 0.9);
  CHECK(a.pieces() == 4);
  CHECK(a.values()[0] == 0.9);
  CHECK(a.values()[1] == -0.9);
  const GridProfile g = a.to_grid(0.25);
  const StepProfile back = StepProfile::from_grid(g);
  CHECK(back.pieces() == 4);
  CHECK(back.breakpoints()[2] == doctest::Approx(4.0));
  CHECK_THROWS(StepProfile({0.0, 2.0, 1.0}, {0.1, 0.2}));
}

TEST_CASE("profile file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "froth_test_profile";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "p.profile").string();
  const GridProfile p = GridProfile::from_function(
      5.0, 0.125, [](double x) { return std::sin(3.1 * x) * 0.999; }, BoundaryKind::periodic);
  save_profile(path, p, {{"energy", "1.0"}}, "test");
  const ProfileFile f = load_profile_file(path);
  CHECK(f.profile.L() == p.L());
  CHECK(f.profile.dx() == p.dx());
  CHECK(f.profile.bc() == BoundaryKind::periodic);
  CHECK(f.extras.at("energy") == "1.0");
  REQUIRE(f.profile.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(f.profile[i] == p[i]);

  const GridProfile c = GridProfile::constant(2.0, 0.25, -0.5);
  save_profile(path, c);
  CHECK(load_profile(path).samples() == c.samples());

  CHECK_THROWS_AS(parse_profile("L 1\ndx 0.5\nbc open\n0.1\n1.5\n"), InvariantError);
  CHECK_THROWS_AS(parse_profile(""), ParseError);
  CHECK_THROWS_AS(parse_profile("L 1\ndx 0.5\nbc open\n0.1\n"), ParseError);
  CHECK_THROWS_AS(parse_profile("L 1\ndx 0.5\nbc sideways\n0.1\n0.2\n"), ParseError);
  try {
    parse_profile("L 1\ndx 0.5\nbc open\n0.1\nfoo\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(GridProfile(1.0, 0.3, std::vector<double>(3, 0.0)), InvariantError);
  CHECK_THROWS_AS(GridProfile(1.0, 0.5, {0.0, 1.2}), InvariantError);
  CHECK_THROWS(GridProfile(1.0, 0.5, {0.0}));
}
