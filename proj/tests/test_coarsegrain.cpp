#include <doctest.h>

#include <cmath>
#include <random>

#include <froth/coarsegrain.hpp>
#include <froth/energy.hpp>
#include <froth/errors.hpp>
#include <froth/instanton.hpp>
#include <froth/model.hpp>
#include <froth/partition.hpp>
#include <froth/sharp_interface.hpp>

using namespace froth;

namespace {

const Instanton& inst() {
  static const Instanton q = solve_instanton(default_params(0.0));
  return q;
}

ModelParams P(double gamma = 1e-2) { return default_params(gamma).with_tau(inst().tau); }

double block_mean(const StepProfile& s, double a, double b) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.pieces(); ++i) {
    const double lo = std::max(a, s.breakpoints()[i]), hi = std::min(b, s.breakpoints()[i + 1]);
    if (hi > lo) m += (hi - lo) * s.values()[i];
  }
  return m / (b - a);
}

void check_mass(const GridProfile& p, const CoarseGrainResult& r) {
  for (const auto& b : r.partition.info) {
    const double want = average_over(p, b.I);
    REQUIRE(std::abs(block_mean(r.sigma, b.I.a, b.I.b) - want) <= 1e-12);
  }
  REQUIRE(std::abs(r.sigma.mean() - average_over(p, {0.0, p.L()})) <= 1e-12);
  for (double v : r.sigma.values()) REQUIRE(std::abs(v) <= 1.0);
}

// h* rounded to the grid so that trial profiles fit
HStar snapped(HStar s) {
  s.h_star = std::round(s.h_star / 0.125) * 0.125;
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  CoarseGrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.rho = 0.06;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = {};
  c.delta = 0.34;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = {};
  c.ell_minus = 0.3;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.ell_minus = 1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.ell_minus = 0.125;
  CHECK_NOTHROW(c.validate());
  CHECK(cg_zeta(1e-2, {}) == doctest::Approx(0.05 * std::pow(1e-2, 0.2) * std::pow(std::log(1e-2), 2)));
  CHECK(cg_m_bar(0.9575, 1e-2, {}) == doctest::Approx(0.9575 - std::pow(1e-2, 0.1)));
}

TEST_CASE("regular partition") {
  const double g = 1e-2, d = 0.2, u = std::pow(g, -d);
  BlockPartition p = regular_partition(10 * u, d, g);
  CHECK(p.size() == 10);
  CHECK(p.alpha_L == doctest::Approx(1.0).epsilon(1e-12));
  p = regular_partition(10.5 * u, d, g);
  CHECK(p.size() == 10);
  CHECK(p.alpha_L == doctest::Approx(1.05).epsilon(1e-12));
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.block(i).length() == doctest::Approx(1.05 * u));
  CHECK(p.L() == doctest::Approx(10.5 * u));
  CHECK_THROWS_AS(regular_partition(0.9 * u, d, g), DomainTooShort);
  for (double f : {1.0, 1.3, 2.7, 17.2}) {
    const double a = alpha_L(f * u, d, g);
    CHECK(a >= 1.0);
    CHECK(a < 2.0);
    const double n = f / a;
    CHECK(std::abs(n - std::round(n)) < 1e-9);
  }
}

TEST_CASE("block classification") {
  const ModelParams p = P();
  const double m = p.m_beta;
  const BlockPartition part = snap_to_grid(regular_partition(50.0, 0.3, 1e-2), 0.125);
  const auto flat = classify_blocks(GridProfile::constant(50.0, 0.125, m), part, p);
  for (const auto& l : flat) {
    CHECK(l.low_energy);
    CHECK(std::abs(l.internal_energy) < 1e-12);
    CHECK(l.type == BlockType::plus);
  }
  const GridProfile sq =
      GridProfile::from_function(50.0, 0.125, [&](double x) { return std::fmod(x, 2.0) < 1.0 ? m : -m; });
  for (const auto& l : classify_blocks(sq, part, p)) CHECK_FALSE(l.low_energy);

  const HStar st = snapped(optimal_h(p));
  const GridProfile tr = build_trial_profile(st.h_star, 4 * st.h_star, inst(), 0.125, BoundaryKind::open);
  const BlockPartition tp = snap_to_grid(regular_partition(tr.L(), 0.2, 1e-2), 0.125);
  const auto lab = classify_blocks(tr, tp, p);
  for (std::size_t i = 0; i < tp.size(); ++i) {
    const Interval I = tp.block(i);
    double dist = 1e9;
    bool straddles = false;
    for (int k = 0; k < 4; ++k) {
      const double f = (k + 0.5) * st.h_star;
      dist = std::min({dist, std::abs(I.a - f), std::abs(I.b - f)});
      straddles |= I.a < f && I.b > f;
    }
    if (!straddles && dist > 4.0) CHECK(lab[i].low_energy);
  }
  CHECK_THROWS_AS(classify_blocks(sq, part, default_params(1e-2)), ParameterError);
}

TEST_CASE("flat segment search") {
  const ModelParams p = P();
  const double m = p.m_beta;
  CoarseGrainConfig cfg;
  const Interval B{0.0, 40.0};
  auto s = find_flat_segment(GridProfile::constant(40.0, 0.125, m), B, p, cfg, 10.0, 10.0);
  REQUIRE(s);
  CHECK(s->omega == 1);
  CHECK(s->a == doctest::Approx(10.0));
  CHECK(s->b == doctest::Approx(30.0));
  CHECK(s->blocks == 80);
  s = find_flat_segment(GridProfile::constant(40.0, 0.125, -m), B, p, cfg, 1.1, 2.3);
  REQUIRE(s);
  CHECK(s->omega == -1);
  CHECK(s->a == doctest::Approx(1.25));
  CHECK(s->b == doctest::Approx(37.5));
  CHECK_FALSE(find_flat_segment(GridProfile::constant(40.0, 0.125, 0.0), B, p, cfg, 5.0, 5.0));

  // front at 25: the - side is longer and must respect the margins
  const GridProfile f = GridProfile::from_function(40.0, 0.125, [&](double x) { return inst()(x - 25.0); });
  s = find_flat_segment(f, B, p, cfg, 10.0, 10.0);
  REQUIRE(s);
  CHECK(s->omega == -1);
  CHECK(s->a == doctest::Approx(10.0));
  const double tol = std::pow(p.gamma, cfg.rho);
  for (double x = s->a; x < s->b - 1e-9; x += cfg.ell_minus)
    CHECK(std::abs(average_over(f, {x, x + cfg.ell_minus}) + m) <= tol);
  // the next small block breaks the run
  CHECK(std::abs(average_over(f, {s->b, s->b + cfg.ell_minus}) + m) > tol);
  // mirrored front: + side wins
  const GridProfile g = GridProfile::from_function(40.0, 0.125, [&](double x) { return inst()(x - 15.0); });
  s = find_flat_segment(g, B, p, cfg, 10.0, 10.0);
  REQUIRE(s);
  CHECK(s->omega == 1);
  CHECK(s->b == doctest::Approx(30.0));
  // ties go left
  const GridProfile t = GridProfile::from_function(40.0, 0.125, [&](double x) { return inst()(x - 20.0); });
  s = find_flat_segment(t, B, p, cfg, 5.0, 5.0);
  REQUIRE(s);
  CHECK(s->omega == -1);
}

TEST_CASE("adapted partition") {
  const ModelParams p = P();
  const double m = p.m_beta;
  const CoarseGrainConfig cfg;
  const AdaptedPartition c = adapted_partition(GridProfile::constant(60.0, 0.125, m), p, cfg);
  CHECK(c.demoted == 0);
  for (const auto& b : c.info) {
    CHECK(b.good);
    if (!b.boundary) {
      CHECK(b.omega_left == 1);
      CHECK(b.omega_right == 1);
    }
    CHECK(b.I.length() >= 0.5 * c.ell_plus - 0.125);
    CHECK(b.I.length() <= 2.5 * c.ell_plus + 0.125);
  }
  for (const auto& s : c.segments) CHECK(s.kind == SegmentKind::single_good_block);
  CHECK(c.blocks.lines.front() == 0.0);
  CHECK(c.blocks.lines.back() == doctest::Approx(60.0));

  const AdaptedPartition z = adapted_partition(GridProfile::constant(60.0, 0.125, 0.0), p, cfg);
  REQUIRE(z.segments.size() == 1);
  CHECK(z.segments[0].kind == SegmentKind::bad_run);
  CHECK(z.segments[0].I.a == 0.0);
  CHECK(z.segments[0].I.b == doctest::Approx(60.0));
  for (const auto& b : z.info) CHECK_FALSE(b.good);

  const HStar st = snapped(optimal_h(p));
  const GridProfile tr = build_trial_profile(st.h_star, 6 * st.h_star, inst(), 0.125, BoundaryKind::open);
  const AdaptedPartition a = adapted_partition(tr, p, cfg);
  int mixed = 0;
  for (const auto& b : a.info) {
    CHECK(b.I.length() >= 0.5 * a.ell_plus - 0.125);
    CHECK(b.I.length() <= 2.5 * a.ell_plus + 0.125);
    if (b.good && b.omega_left * b.omega_right == -1) {
      ++mixed;
      bool straddles = false;
      for (int k = 0; k < 6; ++k) straddles |= b.I.a < (k + 0.5) * st.h_star && b.I.b > (k + 0.5) * st.h_star;
      CHECK(straddles);
    }
  }
  for (const auto& s : a.segments)
    if (s.kind == SegmentKind::single_good_block) CHECK(s.last - s.first == 1);
    else
      for (std::size_t i = s.first; i < s.last; ++i) CHECK(a.info[i].internal_energy > 2 * p.tau);
  CHECK(mixed >= 1);
  CHECK_THROWS_AS(adapted_partition(GridProfile::constant(60.0, 0.1, m), p, cfg), AlignmentError);
}

TEST_CASE("block replacement cases") {
  const ModelParams p = P();
  const double m = p.m_beta;
  const CoarseGrainConfig cfg;
  using K = ReplacementContext::Kind;
  Replacement r = replace_block(10.0, 0.0, {}, p, cfg);
  CHECK(r.case_name == "1_jump");
  REQUIRE(r.piece.pieces() == 2);
  CHECK(r.piece.length(0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(r.piece.values()[0] == m);
  CHECK(r.piece.values()[1] == -m);
  r = replace_block(10.0, 0.99, {}, p, cfg);
  CHECK(r.case_name == "1_constant");

  r = replace_block(10.0, 0.3, {K::good, 1, -1}, p, cfg);
  CHECK(r.case_name == "2a_jump");
  CHECK(r.piece.length(0) == doctest::Approx(10.0 * (0.3 + m) / (2 * m)).epsilon(1e-14));
  r = replace_block(10.0, 0.3, {K::good, -1, 1}, p, cfg);
  CHECK(r.piece.values()[0] == -m);
  CHECK(r.piece.length(0) == doctest::Approx(10.0 * (m - 0.3) / (2 * m)).epsilon(1e-14));

  r = replace_block(50.0, 0.0, {K::good, -1, -1}, p, cfg);
  CHECK(r.case_name == "2b_two_jumps");
  REQUIRE(r.piece.pieces() == 3);
  CHECK(r.piece.length(0) == doctest::Approx(12.5).epsilon(1e-14));
  CHECK(r.piece.length(2) == doctest::Approx(12.5).epsilon(1e-14));
  CHECK(r.piece.values()[0] == -m);
  r = replace_block(50.0, 0.0, {K::good, 1, 1}, p, cfg);
  CHECK(r.piece.values()[0] == m);
  CHECK(replace_block(50.0, -m, {K::good, -1, -1}, p, cfg).case_name == "2b_constant");
  CHECK(replace_block(50.0, m, {K::good, 1, 1}, p, cfg).case_name == "2b_constant");
  CHECK(replace_block(50.0, 0.95, {K::good, -1, -1}, p, cfg).case_name.rfind("2b_plateau", 0) == 0);
  CHECK(replace_block(50.0, 0.97, {K::good, 1, -1}, p, cfg).case_name.rfind("2a_plateau", 0) == 0);

  ReplacementContext bl{K::boundary_good, 0, -1, true};
  r = replace_block(50.0, 0.0, bl, p, cfg);
  CHECK(r.case_name == "2c_jump");
  CHECK(r.piece.values().back() == -m);
  bl = {K::boundary_good, 1, 0, false};
  r = replace_block(50.0, 0.0, bl, p, cfg);
  CHECK(r.piece.values().front() == m);

  CoarseGrainConfig strict;
  strict.strict = true;
  CHECK_THROWS_AS(replace_block(8.0, 0.999, {K::good, -1, -1}, p, strict), InvariantError);
  r = replace_block(8.0, 0.999, {K::good, -1, -1}, p, cfg);
  CHECK(r.degenerate);
  CHECK_THROWS_AS(replace_block(0.0, 0.1, {}, p, cfg), DomainError);
}

TEST_CASE("replacement preserves mass and bounds") {
  const ModelParams p = P();
  const CoarseGrainConfig cfg;
  using K = ReplacementContext::Kind;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0), len(1.0, 60.0);
  const ReplacementContext ctx[] = {{},
                                    {K::good, 1, -1},
                                    {K::good, -1, 1},
                                    {K::good, 1, 1},
                                    {K::good, -1, -1},
                                    {K::boundary_good, 0, 1, true},
                                    {K::boundary_good, 0, -1, true},
                                    {K::boundary_good, 1, 0, false},
                                    {K::boundary_good, -1, 0, false}};
  for (int t = 0; t < 2000; ++t) {
    const double ell = len(rng), mi = u(rng);
    for (const auto& c : ctx) {
      const Replacement r = replace_block(ell, mi, c, p, cfg);
      REQUIRE(r.piece.L() == doctest::Approx(ell).epsilon(1e-14));
      REQUIRE(std::abs(r.piece.mean() - mi) <= 1e-12);
      for (double v : r.piece.values()) REQUIRE(std::abs(v) <= 1.0);
    }
  }
}

TEST_CASE("coarse graining") {
  const ModelParams p = P();
  const double m = p.m_beta;
  const CoarseGrainConfig cfg;
  const GridProfile c = GridProfile::constant(60.0, 0.125, m);
  const CoarseGrainResult rc = coarse_grain(c, p, cfg);
  for (double v : rc.sigma.values()) CHECK(v == doctest::Approx(m).epsilon(1e-12));
  CHECK(rc.in_K);

  const HStar st = snapped(optimal_h(p));
  const GridProfile tr = build_trial_profile(st.h_star, 8 * st.h_star, inst(), 0.125, BoundaryKind::open);
  const CoarseGrainResult r = coarse_grain(tr, p, cfg);
  check_mass(tr, r);
  // fronts sit at (k + 1/2) h*, so the end domains are half as long
  const auto iv = sign_intervals(r.sigma);
  REQUIRE(iv.size() == 9);
  for (std::size_t k = 0; k < iv.size(); ++k) {
    CHECK(iv[k].sign == (k % 2 == 0 ? -1 : 1));
    const double want = (k == 0 || k == 8) ? 0.5 * st.h_star : st.h_star;
    CHECK(std::abs(iv[k].length() - want) <= 2.5 * r.partition.ell_plus);
  }
  CHECK(r.in_K);
  CHECK(r.max_mass_error <= 1e-12);
  const auto j = trace_json(r);
  CHECK(j["blocks"].size() == r.partition.info.size());
  CHECK(j["blocks"][0].contains("case"));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> s(480);
    double v = u(rng);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i % 16 == 0) v = std::clamp(0.7 * v + 0.5 * u(rng), -1.0, 1.0);
      s[i] = std::clamp(v + 0.05 * u(rng), -1.0, 1.0);
    }
    const GridProfile g(60.0, 0.125, s);
    check_mass(g, coarse_grain(g, p, cfg));
  }
  CHECK_THROWS_AS(coarse_grain(GridProfile::constant(2.0, 0.125, m), p, cfg), DomainTooShort);
}

TEST_CASE("idempotence on K") {
  const ModelParams p = P();
  const double m = p.m_beta;
  const CoarseGrainConfig cfg;
  const GridProfile s = StepProfile({0, 20, 40, 60}, {m, 0.99, m}).to_grid(0.125);
  const CoarseGrainResult r = coarse_grain(s, p, cfg);
  for (const auto& b : r.partition.info)
    CHECK(block_mean(r.sigma, b.I.a, b.I.b) == doctest::Approx(average_over(s, b.I)).epsilon(1e-12));
  for (double v : r.sigma.values()) CHECK(v >= m - cg_zeta(p.gamma, cfg));
}

TEST_CASE("dipole stability and lower bound certificate") {
  const ModelParams p = P();
  const CoarseGrainConfig cfg;
  const HStar st = snapped(optimal_h(p));
  const double scale = std::pow(p.gamma, 1.0 - cfg.delta);
  double C[2];
  for (int k = 0; k < 2; ++k) {
    const double L = std::round((k + 1) / p.gamma / 0.125) * 0.125;
    const GridProfile tr = build_trial_profile(st.h_star, L, inst(), 0.125, BoundaryKind::open);
    const CoarseGrainResult r = coarse_grain(tr, p, cfg);
    C[k] = std::abs(dipole_energy(tr, p) - dipole_energy(r.sigma, p)) / (L * scale);
    const Certificate cert = lower_bound_certificate(tr, p, cfg);
    CHECK(cert.pass);
    CHECK(cert.param("max_mass_error") <= 1e-12);
  }
  CHECK(C[0] < 1.0);
  CHECK(C[1] < 1.0);
  CHECK(std::max(C[0], C[1]) <= 1.3 * std::min(C[0], C[1]) + 0.05);

  const Certificate c0 = lower_bound_certificate(GridProfile::constant(60.0, 0.125, p.m_beta), p, cfg);
  CHECK(c0.pass);
  CHECK(c0.lhs * 60.0 >= -1e-10);
}
