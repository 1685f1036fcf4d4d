#include <doctest.h>

#include <cmath>
#include <random>

#include <froth/energy.hpp>
#include <froth/errors.hpp>
#include <froth/model.hpp>
#include <froth/profile.hpp>

using namespace froth;

namespace {

// Brute-force O(N (N + M)) evaluation of the same discretized functional.
// Exterior cells are generated explicitly from the boundary condition.
struct Brute {
  const ModelParams& p;
  double dx;

  // int_{cell} int_{cell + k dx} e^{-kappa |x - y|}
  double cell_kernel(long k, double kappa) const {
    k = std::abs(k);
    if (k == 0) return 2.0 * (kappa * dx - 1.0 + std::exp(-kappa * dx)) / (kappa * kappa);
    const double s = 2.0 * std::sinh(0.5 * kappa * dx) / kappa;
    return std::exp(-kappa * dx * static_cast<double>(k)) * s * s;
  }

  double exterior(const GridProfile& g, long j) const {
    const long N = static_cast<long>(g.size());
    switch (g.bc()) {
      case BoundaryKind::plus: return p.m_beta;
      case BoundaryKind::minus: return -p.m_beta;
      case BoundaryKind::neumann: {
        long r = ((j % (2 * N)) + 2 * N) % (2 * N);
        return g[static_cast<std::size_t>(r < N ? r : 2 * N - 1 - r)];
      }
      case BoundaryKind::custom: {
        const auto& c = g.custom();
        if (j < 0) {
          const long t = static_cast<long>(c.left.size()) + j;
          return t >= 0 ? c.left[static_cast<std::size_t>(t)] : 0.0;
        }
        const long t = j - N;
        return t < static_cast<long>(c.right.size()) ? c.right[static_cast<std::size_t>(t)] : 0.0;
      }
      default: return 0.0;
    }
  }

  double total(const GridProfile& g) const {
    const long N = static_cast<long>(g.size());
    const auto w = p.kernel.stencil(dx);
    const long K = static_cast<long>(w.size()) - 1;
    double loc = 0.0;
    for (long i = 0; i < N; ++i) loc += eval_F(g[static_cast<std::size_t>(i)], p) * dx;
    double ex = 0.0, dip = 0.0;
    const bool per = g.bc() == BoundaryKind::periodic;
    for (long i = 0; i < N; ++i) {
      const double a = g[static_cast<std::size_t>(i)];
      for (long j = 0; j < N; ++j) {
        const double b = g[static_cast<std::size_t>(j)];
        long d = std::abs(i - j);
        if (per) d = std::min(d, N - d);
        if (d >= 1 && d <= K) ex += 0.25 * dx * w[static_cast<std::size_t>(d)] * (a - b) * (a - b);
        for (const auto& at : p.measure.atoms()) {
          const double kappa = p.gamma * at.rate, c = p.measure.lambda() * at.weight;
          if (!per) {
            dip += 0.5 * p.gamma * c * a * b * cell_kernel(i - j, kappa);
          } else {
            for (long n = -200; n <= 200; ++n) {
              const long k = i - j + n * N;
              if (kappa * dx * (std::abs(k) - 1) > 45.0) continue;
              dip += 0.5 * p.gamma * c * a * b * cell_kernel(k, kappa);
            }
          }
        }
      }
    }
    if (!per && g.bc() != BoundaryKind::open) {
      long M = K;
      for (const auto& at : p.measure.atoms())
        M = std::max(M, static_cast<long>(45.0 / (p.gamma * at.rate * dx)) + 2);
      for (long i = 0; i < N; ++i) {
        const double a = g[static_cast<std::size_t>(i)];
        for (long j = -M; j < N + M; ++j) {
          if (j >= 0 && j < N) continue;
          const double b = exterior(g, j);
          const long d = std::abs(i - j);
          if (d <= K) ex += 0.5 * dx * w[static_cast<std::size_t>(d)] * (a - b) * (a - b);
          for (const auto& at : p.measure.atoms())
            dip += p.gamma * p.measure.lambda() * at.weight * a * b *
                   cell_kernel(i - j, p.gamma * at.rate);
        }
      }
    }
    return loc + ex + dip;
  }
};

GridProfile random_profile(std::mt19937_64& rng, double L, double dx, BoundaryKind bc,
                           double amp = 0.95) {
  std::uniform_real_distribution<double> u(-amp, amp);
  const auto n = static_cast<std::size_t>(std::llround(L / dx));
  std::vector<double> s(n);
  for (auto& v : s) v = u(rng);
  return GridProfile(L, dx, s, bc);
}

ModelParams two_atoms(double gamma) {
  return make_params(2.0, ShortRangeKernel::quartic(1.0), KacMeasure({{0.4, 1.0}, {0.6, 2.5}}, 1.3),
                     gamma);
}

}  // namespace

TEST_CASE("short-range energy values") {
  const ModelParams p = default_params();
  const GridProfile c = GridProfile::constant(20.0, 0.125, p.m_beta);
  CHECK(short_range_energy(c, p, {0.0, 20.0}) == doctest::Approx(0.0).epsilon(1e-14));
  const GridProfile z = GridProfile::constant(10.0, 0.125, 0.0);
  CHECK(short_range_energy(z, p, {0.0, 10.0}) == doctest::Approx(10.0 * p.F0).epsilon(1e-13));
  CHECK(std::abs(short_range_energy(z, p, {0.0, 10.0}) - 1.6327) < 1e-4);
  CHECK_THROWS_AS(short_range_energy(z, p, {0.01, 2.0}), AlignmentError);
}

TEST_CASE("total energy matches brute force for every boundary condition") {
  std::mt19937_64 rng(11);
  for (const ModelParams& p : {default_params(0.05), two_atoms(0.08)}) {
    for (BoundaryKind bc : {BoundaryKind::open, BoundaryKind::periodic, BoundaryKind::plus,
                            BoundaryKind::minus, BoundaryKind::neumann}) {
      const GridProfile g = random_profile(rng, 16.0, 0.125, bc);
      const Brute b{p, g.dx()};
      const EnergyBreakdown e = total_energy(g, p);
      CAPTURE(to_string(bc));
      CHECK(e.total == doctest::Approx(b.total(g)).epsilon(1e-10));
      CHECK(e.total == doctest::Approx(e.local + e.exchange + e.dipole + e.boundary).epsilon(1e-12));
      CHECK(e.local >= 0.0);
      CHECK(e.exchange >= 0.0);
      if (bc == BoundaryKind::open) CHECK(e.boundary == 0.0);
    }
  }
}

TEST_CASE("custom boundary data") {
  std::mt19937_64 rng(5);
  const ModelParams p = default_params(0.5);
  const double dx = 0.125;
  const std::size_t n_out = static_cast<std::size_t>(46.0 / (0.5 * dx)) + 8;
  std::uniform_real_distribution<double> u(-1, 1);
  CustomBoundary out;
  for (std::size_t i = 0; i < n_out; ++i) {
    out.left.push_back(u(rng));
    out.right.push_back(u(rng));
  }
  GridProfile g = random_profile(rng, 12.0, dx, BoundaryKind::open).with_bc(BoundaryKind::custom, out);
  const Brute b{p, dx};
  CHECK(total_energy(g, p).total == doctest::Approx(b.total(g)).epsilon(1e-10));
  CustomBoundary tiny{{0.1, 0.2}, {0.3, 0.4}};
  CHECK_THROWS_AS(total_energy(g.with_bc(BoundaryKind::custom, tiny), p), MissingBoundaryData);
}

TEST_CASE("linear-time dipole equals direct sum on N = 4000") {
  std::mt19937_64 rng(3);
  const ModelParams p = two_atoms(0.01);
  const GridProfile g = random_profile(rng, 500.0, 0.125, BoundaryKind::open, 1.0);
  const Brute b{p, g.dx()};
  double direct = 0.0;
  const long N = static_cast<long>(g.size());
  for (const auto& at : p.measure.atoms()) {
    const double kappa = p.gamma * at.rate;
    std::vector<double> kern(static_cast<std::size_t>(N));
    for (long k = 0; k < N; ++k) kern[static_cast<std::size_t>(k)] = b.cell_kernel(k, kappa);
    double s = 0.0;
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j)
        s += g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)] *
             kern[static_cast<std::size_t>(std::abs(i - j))];
    direct += 0.5 * p.gamma * p.measure.lambda() * at.weight * s;
  }
  CHECK(dipole_energy(g, p) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("dipole closed forms") {
  const ModelParams p = default_params(0.02);
  const double L = 60.0, k = 0.02;
  const GridProfile one = GridProfile::constant(L, 0.125, 1.0);
  const double exact = 1.0 / (k) * (k * L - 1.0 + std::exp(-k * L));
  CHECK(dipole_energy(one, p) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(dipole_energy(GridProfile::constant(L, 0.125, 0.0), p) == 0.0);

  const GridProfile mp = GridProfile::constant(200.0, 0.125, p.m_beta, BoundaryKind::periodic);
  const EnergyBreakdown e = total_energy(mp, p);
  CHECK((e.dipole + e.boundary) / 200.0 == doctest::Approx(p.m_beta * p.m_beta).epsilon(1e-12));
  CHECK(std::abs((e.dipole + e.boundary) / 200.0 - 0.91681) < 1e-5);
  CHECK(e.local == 0.0);
  CHECK(e.exchange == 0.0);

  const GridProfile z = GridProfile::constant(30.0, 0.125, 0.0, BoundaryKind::neumann);
  CHECK(total_energy(z, p).total == doctest::Approx(30.0 * p.F0).epsilon(1e-13));
}

TEST_CASE("square-wave dipole equals the sharp-interface long-range term") {
  const ModelParams p = default_params(0.05);
  const double h = 10.0, L = 80.0, m = p.m_beta;
  for (double dx : {0.5, 0.25, 0.125}) {
    // shifted by h/2 so the wrap carries no jump and boundary is pure dipole
    const GridProfile sq = GridProfile::from_function(
        L, dx, [&](double y) { return std::sin(M_PI * (y - h / 2) / h) >= 0 ? m : -m; },
        BoundaryKind::periodic);
    const EnergyBreakdown e = total_energy(sq, p);
    const double x = 0.05 * h / 2;
    const double want = m * m * (1.0 - std::tanh(x) / x);
    const double err = std::abs((e.dipole + e.boundary) / L - want);
    CHECK(err < 1e-12);  // exact on grid-aligned jumps
  }
}

TEST_CASE("alternating profiles lose dipole energy as h shrinks") {
  const ModelParams p = default_params(0.05);
  const double L = 96.0;
  double prev = 1e300;
  for (double h : {48.0, 24.0, 12.0, 6.0, 3.0}) {
    const double d = dipole_energy(StepProfile::alternating(h, L, p.m_beta), p, false);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("step and grid dipoles agree on grid-aligned steps") {
  const ModelParams p = two_atoms(0.03);
  const StepProfile s({0.0, 2.5, 7.0, 7.25, 15.0, 20.0}, {0.9, -0.95, 0.3, -0.97, 0.9});
  for (bool per : {false, true}) {
    const GridProfile g = s.to_grid(0.125, per ? BoundaryKind::periodic : BoundaryKind::open);
    const EnergyBreakdown e = total_energy(g, p);
    const double grid = per ? e.dipole + e.boundary : e.dipole;
    CHECK(dipole_energy(s, p, per) == doctest::Approx(grid).epsilon(1e-12));
  }
}

TEST_CASE("tilde energy") {
  const ModelParams p = default_params(0.02).with_tau(0.2);
  const double m = p.m_beta;
  const StepProfile c({0.0, 30.0}, {m});
  CHECK(tilde_energy(c, p) == doctest::Approx(dipole_energy(c, p)).epsilon(1e-15));
  const StepProfile alt = StepProfile::alternating(3.0, 33.0, m);
  CHECK(count_sign_changes(alt) == 10);
  CHECK(tilde_energy(alt, p) - dipole_energy(alt, p) == doctest::Approx(10 * 0.2).epsilon(1e-12));
  const StepProfile low({0.0, 4.0, 10.0}, {0.9 * m, -m});
  CHECK(tilde_energy(low, p) - dipole_energy(low, p) - 0.2 ==
        doctest::Approx(4.0 * eval_tilde_F(0.9 * m, p)).epsilon(1e-12));
  CHECK(count_sign_changes(StepProfile({0.0, 1.0, 2.0, 3.0}, {m, 0.0, m})) == 0);
  CHECK(count_sign_changes(StepProfile::alternating(2.0, 8.0, m), true) == 4);
  CHECK_THROWS_AS(tilde_energy(alt, default_params(0.02)), ParameterError);
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(42);
  const ModelParams ps[] = {default_params(0.05), two_atoms(0.1)};
  const BoundaryKind bcs[] = {BoundaryKind::open, BoundaryKind::periodic, BoundaryKind::plus,
                              BoundaryKind::minus, BoundaryKind::neumann};
  for (int r = 0; r < 20; ++r) {
    const ModelParams& p = ps[r % 2];
    const GridProfile g = random_profile(rng, 64.0, 0.125, bcs[r % 5], 0.95);
    REQUIRE(g.size() == 512);
    const EnergyEvaluator ev(g, p);
    std::vector<double> x = g.samples(), grad;
    ev.energy_and_gradient(x, grad);
    double gmax = 0.0, worst = 0.0;
    for (double v : grad) gmax = std::max(gmax, std::abs(v));
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    for (int t = 0; t < 24; ++t) {
      const std::size_t i = t < 4 ? std::size_t(t) : (t < 8 ? x.size() - 1 - std::size_t(t - 4) : pick(rng));
      const double h = 1e-6, x0 = x[i];
      x[i] = x0 + h;
      const double up = ev.energy(x).total;
      x[i] = x0 - h;
      const double dn = ev.energy(x).total;
      x[i] = x0;
      worst = std::max(worst, std::abs((up - dn) / (2 * h) / g.dx() - grad[i]));
    }
    CAPTURE(r);
    CHECK(worst / gmax <= 1e-6);
  }
}

TEST_CASE("stationary constants") {
  const ModelParams p = default_params(0.0);
  const GridProfile c = GridProfile::constant(10.0, 0.125, p.m_beta);
  for (double v : energy_gradient(c, p)) CHECK(std::abs(v) < 1e-12);
  const GridProfile z = GridProfile::constant(10.0, 0.125, 0.0);
  for (double v : energy_gradient(z, p)) CHECK(v == 0.0);
  CHECK(total_energy(c, p).total == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("symmetries and superadditivity") {
  std::mt19937_64 rng(9);
  const ModelParams p = two_atoms(0.04);
  for (BoundaryKind bc : {BoundaryKind::open, BoundaryKind::periodic, BoundaryKind::neumann}) {
    const GridProfile g = random_profile(rng, 24.0, 0.125, bc);
    std::vector<double> neg = g.samples(), rev(g.samples().rbegin(), g.samples().rend());
    for (auto& v : neg) v = -v;
    const double E = total_energy(g, p).total;
    CHECK(total_energy(g.with_samples(neg), p).total == doctest::Approx(E).epsilon(1e-12));
    if (bc != BoundaryKind::neumann)
      CHECK(total_energy(g.with_samples(rev), p).total == doctest::Approx(E).epsilon(1e-12));
  }
  const ModelParams p0 = p.with_gamma(0.0);
  for (int r = 0; r < 10; ++r) {
    const GridProfile g = random_profile(rng, 24.0, 0.125, BoundaryKind::open);
    const double whole = short_range_energy(g, p0, {0.0, 24.0});
    CHECK(total_energy(g, p0).total == doctest::Approx(whole).epsilon(1e-12));
    double parts = 0.0;
    const double cuts[] = {0.0, 3.5, 4.0, 11.25, 17.0, 24.0};
    for (int k = 0; k < 5; ++k) parts += short_range_energy(g, p0, {cuts[k], cuts[k + 1]});
    CHECK(whole >= parts);
  }
}

TEST_CASE("energy breakdown json") {
  const ModelParams p = default_params(0.05);
  const auto j = to_json(total_energy(GridProfile::constant(10.0, 0.125, 0.3), p));
  for (const char* k : {"local", "exchange", "dipole", "boundary", "total"}) CHECK(j.contains(k));
}
