#include <froth/instanton.hpp>

#include <algorithm>
#include <cmath>

#include <froth/energy.hpp>
#include <froth/errors.hpp>

namespace froth {

namespace {

// T(q) = tanh(beta J*q) with -m / +m outside.
void picard_map(const std::vector<double>& q, const std::vector<double>& w, double beta,
                double m, std::vector<double>& out) {
  const long N = static_cast<long>(q.size());
  const long K = static_cast<long>(w.size()) - 1;
  out.resize(q.size());
  for (long i = 0; i < N; ++i) {
    double c = w[0] * q[static_cast<std::size_t>(i)];
    for (long k = 1; k <= K; ++k) {
      const long l = i - k, r = i + k;
      const double ql = l < 0 ? -m : q[static_cast<std::size_t>(l)];
      const double qr = r >= N ? m : q[static_cast<std::size_t>(r)];
      c += w[static_cast<std::size_t>(k)] * (ql + qr);
    }
    out[static_cast<std::size_t>(i)] = std::tanh(beta * c);
  }
}

CustomBoundary front_exterior(std::size_t K, double m) {
  return {std::vector<double>(K, -m), std::vector<double>(K, m)};
}

}  // namespace

double Instanton::operator()(double x) const {
  const double dx = profile.dx();
  const double u = (x + W) / dx - 0.5;
  const auto n = static_cast<long>(profile.size());
  if (u <= 0.0) return x + W < 0.0 ? -m_beta : profile[0];
  if (u >= static_cast<double>(n - 1)) return x > W ? m_beta : profile[static_cast<std::size_t>(n - 1)];
  const long i = static_cast<long>(std::floor(u));
  const double t = u - static_cast<double>(i);
  return (1.0 - t) * profile[static_cast<std::size_t>(i)] + t * profile[static_cast<std::size_t>(i + 1)];
}

Instanton solve_instanton(const ModelParams& params, const InstantonOptions& opt) {
  if (opt.W < 20.0) throw ParameterError("instanton half-width W must be at least 20");
  if (opt.tol < 1e-12) throw ParameterError("instanton tolerance must be at least 1e-12");
  if (!(opt.damping >= 0.0 && opt.damping < 1.0)) throw ParameterError("damping must lie in [0,1)");
  const double dx = opt.dx;
  const double m = params.m_beta;
  const auto w = params.kernel.stencil(dx);
  const auto N = static_cast<std::size_t>(std::llround(2.0 * opt.W / dx));
  if (N % 2 != 0) throw AlignmentError("2W/dx must be even");

  std::vector<double> q(N), t;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * dx - opt.W;
    q[i] = opt.init == InstantonOptions::Init::tanh ? m * std::tanh(x) : (x > 0 ? m : -m);
  }

  long sweep = 0;
  double defect = 0.0;
  for (;; ++sweep) {
    picard_map(q, w, params.beta, m, t);
    defect = 0.0;
    for (std::size_t i = 0; i < N; ++i) defect = std::max(defect, std::abs(t[i] - q[i]));
    if (defect <= opt.tol) break;
    if (sweep >= opt.max_sweeps)
      throw NonConvergence("instanton: defect " + std::to_string(defect) + " after " +
                           std::to_string(sweep) + " sweeps");
    for (std::size_t i = 0; i < N / 2; ++i) {
      const std::size_t j = N - 1 - i;
      const double a = 0.5 * (t[j] - t[i]);
      t[j] = a;
      t[i] = -a;
    }
    if (opt.damping > 0.0)
      for (std::size_t i = 0; i < N; ++i) t[i] = (1.0 - opt.damping) * t[i] + opt.damping * q[i];
    q.swap(t);
    for (std::size_t i = 0; i + 1 < N; ++i)
      if (q[i + 1] < q[i] - 1e-14)
        throw NonConvergence("instanton: monotonicity lost at sweep " + std::to_string(sweep));
  }

  Instanton inst{GridProfile(2.0 * opt.W, dx, q, BoundaryKind::custom,
                             front_exterior(w.size() - 1, m)),
                 opt.W, m, 0.0, 0.0, 0, {}};
  inst.residual = defect;
  inst.sweeps = sweep;
  inst.tau = surface_tension(inst, params);
  try {
    inst.tail = tail_rate(inst);
  } catch (const FitError&) {
    inst.tail = {};
  }
  return inst;
}

double fixed_point_residual(const Instanton& inst, const ModelParams& params) {
  const auto w = params.kernel.stencil(inst.profile.dx());
  std::vector<double> t;
  picard_map(inst.profile.samples(), w, params.beta, inst.m_beta, t);
  double d = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) d = std::max(d, std::abs(t[i] - inst.profile[i]));
  return d;
}

double surface_tension(const Instanton& inst, const ModelParams& params) {
  const auto K = params.kernel.stencil(inst.profile.dx()).size() - 1;
  const GridProfile p = inst.profile.with_bc(BoundaryKind::custom, front_exterior(K, inst.m_beta));
  return total_energy(p, params.with_gamma(0.0)).total;
}

TailFit tail_rate(const Instanton& inst, double floor) {
  const double m = inst.m_beta;
  const std::size_t N = inst.profile.size();
  if (floor <= 0.0) floor = std::max(1e-9, 1e2 * inst.residual);
  auto dev = [&](std::size_t i) { return m - inst.profile[i]; };
  auto fit = [&](std::size_t i0, std::size_t i1) {
    // least squares of log(dev) = c - rate x over samples [i0, i1)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i) {
      const double x = inst.x(i), y = std::log(dev(i));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double r2 = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
      const double r = std::log(dev(i)) - (icpt + slope * inst.x(i));
      r2 += r * r;
    }
    TailFit f;
    f.rate = -slope;
    f.residual = std::sqrt(r2 / n);
    f.x_lo = inst.x(i0);
    f.x_hi = inst.x(i1 - 1);
    f.samples = static_cast<int>(i1 - i0);
    return f;
  };
  const double W = inst.W;
  std::size_t a = N, b = 0;
  for (std::size_t i = N / 2; i < N; ++i) {
    const double x = inst.x(i);
    if (x >= 0.5 * W && a == N) a = i;
    if (x <= W - 2.0) b = i + 1;
  }
  bool resolvable = a < b;
  for (std::size_t i = a; resolvable && i < b; ++i) resolvable = dev(i) >= floor;
  if (resolvable) return fit(a, b);

  // fallback window: deviation between floor and 1e-3, core excluded
  std::size_t lo = N, hi = N;
  for (std::size_t i = N / 2; i < N; ++i) {
    const double d = dev(i);
    if (lo == N && d <= 1e-3) lo = i;
    if (lo != N && d < floor) {
      hi = i;
      break;
    }
  }
  if (lo == N || hi == N || hi <= lo + 8 || inst.x(hi) - inst.x(lo) < 0.5)
    throw FitError("tail deviation underflows before a usable fit window");
  return fit(lo, hi);
}

double instanton_half_width(const Instanton& inst) {
  const std::size_t N = inst.profile.size();
  for (std::size_t i = N / 2; i < N; ++i)
    if (std::abs(inst.profile[i]) >= 0.999 * inst.m_beta) return inst.x(i);
  return inst.W;
}

GridProfile build_trial_profile(double h, double L, const Instanton& q, double dx,
                                BoundaryKind bc) {
  const double width = instanton_half_width(q);
  if (h < 4.0 * width)
    throw CellTooShort("cell length " + std::to_string(h) + " below 4x instanton half-width " +
                       std::to_string(width));
  if (bc == BoundaryKind::periodic) {
    const double r = L / (2.0 * h);
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
      throw ParameterError("periodic trial profile needs L to be a multiple of 2h");
  }
  return GridProfile::from_function(
      L, dx,
      [&](double x) {
        const double k = std::floor(x / h);
        const double z = h * (k + 0.5);
        const double s = std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0;
        return std::clamp(s * q(x - z), -1.0, 1.0);
      },
      bc);
}

}  // namespace froth
