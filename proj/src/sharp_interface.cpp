#include <froth/sharp_interface.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <froth/energy.hpp>
#include <froth/errors.hpp>
#include <froth/exp_kernel.hpp>

namespace froth {

namespace {

void require_tau(const ModelParams& p) {
  if (!p.has_tau()) throw ParameterError("surface tension tau is not set");
  if (!(p.tau > 0.0)) throw ParameterError("surface tension tau must be positive");
}

// 1 - tanh(x)/x, series for small x
double one_minus_tanhc(double x) {
  if (x < 1e-4) return x * x / 3.0 - 2.0 * std::pow(x, 4) / 15.0;
  return 1.0 - std::tanh(x) / x;
}

// d/dx [tanh(x)/x]
double tanhc_prime(double x) {
  if (x < 1e-4) return -2.0 * x / 3.0 + 8.0 * x * x * x / 15.0;
  const double c = std::cosh(x);
  return (x / (c * c) - std::tanh(x)) / (x * x);
}

// Restriction of a step profile to [a, b), shifted to start at 0.
StepProfile restrict_to(const StepProfile& s, double a, double b) {
  std::vector<double> br{0.0}, val;
  const auto& B = s.breakpoints();
  for (std::size_t i = 0; i < s.pieces(); ++i) {
    const double lo = std::max(a, B[i]), hi = std::min(b, B[i + 1]);
    if (hi > lo) {
      br.push_back(hi - a);
      val.push_back(s.values()[i]);
    }
  }
  br.back() = b - a;
  return {br, val};
}

// Values of the sign interval [a, b) of a (possibly periodic) profile, laid on [0, b - a).
StepProfile interval_piece(const StepProfile& s, const SignInterval& I) {
  const double L = s.L();
  if (I.b <= L) return restrict_to(s, I.a, I.b);
  const StepProfile left = restrict_to(s, I.a, L), right = restrict_to(s, 0.0, I.b - L);
  std::vector<double> br = left.breakpoints(), val = left.values();
  for (std::size_t i = 0; i < right.pieces(); ++i) {
    br.push_back(br.back() + right.length(i));
    val.push_back(right.values()[i]);
  }
  return {br, val};
}

}  // namespace

double long_range_per_length(double h, const ModelParams& params, double m) {
  double s = 0.0;
  for (const auto& at : params.measure.atoms())
    s += at.weight / at.rate * one_minus_tanhc(0.5 * at.rate * params.gamma * h);
  return params.measure.lambda() * m * m * s;
}

double energy_per_length(double h, const ModelParams& params) {
  if (!(h > 0.0)) throw DomainError("half-period h must be positive");
  require_tau(params);
  return params.tau / h + long_range_per_length(h, params, params.m_beta);
}

double energy_per_length_derivative(double h, const ModelParams& params) {
  if (!(h > 0.0)) throw DomainError("half-period h must be positive");
  require_tau(params);
  const double m = params.m_beta;
  double s = 0.0;
  for (const auto& at : params.measure.atoms()) {
    const double k = 0.5 * at.rate * params.gamma;
    s -= at.weight / at.rate * k * tanhc_prime(k * h);
  }
  return -params.tau / (h * h) + params.measure.lambda() * m * m * s;
}

double asymptotic_h_star(double tau, double m, double v_prime0, double gamma) {
  return std::cbrt(6.0 * tau / (v_prime0 * m * m)) * std::pow(gamma, -2.0 / 3.0);
}

double asymptotic_e_star(double tau, double m, double v_prime0, double gamma) {
  return std::cbrt(9.0 / 16.0 * tau * tau * m * m * v_prime0) * std::pow(gamma, 2.0 / 3.0);
}

HStar optimal_h(const ModelParams& params) {
  require_tau(params);
  const double g = params.gamma;
  if (!(g > 0.0 && g < 0.2)) throw ParameterError("optimal_h needs gamma in (0, 0.2)");
  auto e = [&](double h) { return energy_per_length(h, params); };
  const double lo0 = std::pow(g, -1.0 / 3.0), hi0 = 1.0 / g;

  // golden section in log h
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo0), b = std::log(hi0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = e(std::exp(c)), fd = e(std::exp(d));
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = e(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = e(std::exp(d));
    }
  }
  double h = std::exp(0.5 * (a + b));
  const double edge_tol = 1e-6;
  if (std::log(h) - std::log(lo0) < edge_tol || std::log(hi0) - std::log(h) < edge_tol)
    throw BracketError("minimum of e(h) touches the bracket [gamma^{-1/3}, gamma^{-1}]");

  // polish on the sign change of e'
  double lo = std::exp(a) * (1 - 1e-6), hi = std::exp(b) * (1 + 1e-6);
  if (energy_per_length_derivative(lo, params) < 0.0 && energy_per_length_derivative(hi, params) > 0.0) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (energy_per_length_derivative(mid, params) < 0.0 ? lo : hi) = mid;
    }
    h = 0.5 * (lo + hi);
  }

  HStar s;
  s.gamma = g;
  s.h_star = h;
  s.e_star = e(h);
  const double vp = v_prime_at_zero(params.measure);
  s.h_star_asym = asymptotic_h_star(params.tau, params.m_beta, vp, g);
  s.e_star_asym = asymptotic_e_star(params.tau, params.m_beta, vp, g);
  const double g23 = std::pow(g, 2.0 / 3.0);
  s.C_h = std::abs(s.h_star / s.h_star_asym - 1.0) / g23;
  s.C_e = std::abs(s.e_star / s.e_star_asym - 1.0) / g23;
  return s;
}

EhCurve eh_curve(const ModelParams& params, int n, double h_lo, double h_hi) {
  if (n < 2) throw ParameterError("eh curve needs at least 2 samples");
  EhCurve c;
  c.gamma = params.gamma;
  c.tau = params.tau;
  c.star = optimal_h(params);
  if (h_lo <= 0.0) h_lo = c.star.h_star / 100.0;
  if (h_hi <= 0.0) h_hi = 100.0 / params.gamma;
  if (!(h_hi > h_lo)) throw ParameterError("eh curve needs h_hi > h_lo");
  const double la = std::log(h_lo), lb = std::log(h_hi);
  for (int i = 0; i < n; ++i) {
    const double h = std::exp(la + (lb - la) * i / (n - 1));
    c.samples.emplace_back(h, energy_per_length(h, params));
  }
  return c;
}

Certificate check_eh_bounds(const ModelParams& params, int n) {
  const HStar st = optimal_h(params);
  if (st.h_star < 10.0) throw ParameterError("check_eh_bounds needs h* >= 10");
  const double g = params.gamma, hs = st.h_star;
  const double la = std::log(hs / 100.0), lb = std::log(100.0 / g);
  std::vector<double> hs_grid, de, dp;
  for (int i = 0; i < n; ++i) {
    const double h = std::exp(la + (lb - la) * i / (n - 1));
    if (std::abs(h / hs - 1.0) < 1e-6) continue;
    const double dh = 1e-5 * h;
    hs_grid.push_back(h);
    de.push_back(energy_per_length(h, params) - st.e_star);
    dp.push_back(std::abs(energy_per_length(h + dh, params) - energy_per_length(h - dh, params)) /
                 (2.0 * dh));
  }
  const double cps[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const double Cps[] = {0.5, 1.0, 2.0, 5.0, 10.0};
  const double C_max = 1e6;
  double best_score = -1.0, best_c = 0, best_C = 0, best_cp = 0, best_Cp = 0;
  for (double cp : cps)
    for (double Cp : Cps) {
      if (!(cp * hs < Cp / g)) continue;
      double c = std::numeric_limits<double>::infinity(), C = 0.0;
      for (std::size_t i = 0; i < hs_grid.size(); ++i) {
        const double h = hs_grid[i];
        double lower, upper;
        if (h <= cp * hs) {
          lower = 1.0 / h;
          upper = 1.0 / (h * h);
        } else if (h <= Cp / g) {
          lower = g * g * (h - hs) * (h - hs);
          upper = g * g * std::abs(h - hs);
        } else {
          lower = 1.0;
          upper = 1.0 / (g * h * h);
        }
        c = std::min(c, de[i] / lower);
        C = std::max(C, dp[i] / upper);
      }
      const double score = c > 0.0 ? c / C : -1.0;
      if (score > best_score) {
        best_score = score;
        best_c = c;
        best_C = C;
        best_cp = cp;
        best_Cp = Cp;
      }
    }
  Certificate cert;
  cert.name = "eh_bounds";
  cert.lhs = best_c;
  cert.rhs = 0.0;
  cert.slack = best_c;
  cert.params = {{"gamma", g},   {"h_star", hs},    {"c", best_c},
                 {"C", best_C},  {"c_prime", best_cp}, {"C_prime", best_Cp},
                 {"samples", static_cast<double>(hs_grid.size())}};
  cert.pass = best_c > 0.0 && best_C < C_max;
  return cert;
}

double tilde_v_kernel(double h, double x, double y, const ModelParams& params) {
  if (!(h > 0.0)) throw DomainError("cell length must be positive");
  if (x < 0.0 || x > h || y < 0.0 || y > h) throw DomainError("tilde_v_h needs x, y in [0, h]");
  const double d = std::abs(y - x), s = x + y;
  double total = 0.0;
  for (const auto& at : params.measure.atoms()) {
    const double k = params.gamma * at.rate;
    const double inv = 1.0 / -std::expm1(-2.0 * k * h);
    const double t = std::exp(-k * d) +
                     (std::exp(-k * (2.0 * h + d)) + std::exp(-k * (2.0 * h - d))) * inv -
                     (std::exp(-k * s) + std::exp(-k * (2.0 * h - s))) * inv;
    total += at.weight * t;
  }
  return params.gamma * params.measure.lambda() * total;
}

double tilde_v_quadratic(const StepProfile& sigma, const ModelParams& params) {
  const double h = sigma.L();
  std::vector<double> len(sigma.pieces());
  for (std::size_t i = 0; i < len.size(); ++i) len[i] = sigma.length(i);
  const auto& val = sigma.values();
  std::vector<double> U;
  double total = 0.0;
  for (const auto& at : params.measure.atoms()) {
    const double k = params.gamma * at.rate;
    expk::potential(len, val, k, U);
    const auto mom = expk::edge_moments(len, k);
    double self = 0.0, A = 0.0, B = 0.0;
    for (std::size_t i = 0; i < len.size(); ++i) {
      self += val[i] * U[i];
      A += val[i] * mom.a[i];
      B += val[i] * mom.b[i];
    }
    const double img = (2.0 * std::exp(-k * h) * A * B - A * A - B * B) / -std::expm1(-2.0 * k * h);
    total += at.weight * (self + img);
  }
  return params.gamma * params.measure.lambda() * total;
}

double cell_specific_energy(const StepProfile& sigma, const ModelParams& params) {
  require_tau(params);
  bool pos = false, neg = false;
  for (double v : sigma.values()) {
    pos = pos || v > 0.0;
    neg = neg || v < 0.0;
  }
  if (pos && neg) throw SignError("cell profile changes sign");
  const StepProfile s = neg ? sigma.negated() : sigma;
  const double h = s.L();
  double loc = 0.0;
  for (std::size_t i = 0; i < s.pieces(); ++i) loc += eval_tilde_F(s.values()[i], params) * s.length(i);
  return loc / h + params.tau / h + tilde_v_quadratic(s, params) / (2.0 * h);
}

double cell_specific_energy(const GridProfile& sigma, const ModelParams& params) {
  return cell_specific_energy(StepProfile::from_grid(sigma), params);
}

ChessboardBound chessboard_lower_bound(const StepProfile& step, const ModelParams& params,
                                       bool periodic) {
  ChessboardBound out;
  for (const auto& I : sign_intervals(step, periodic)) {
    const StepProfile piece = interval_piece(step, I);
    const double e = I.length() * cell_specific_energy(piece, params);
    out.lengths.push_back(I.length());
    out.per_interval.push_back(e);
    out.bound += e;
  }
  const auto owned = static_cast<double>(count_sign_changes(step, periodic));
  out.boundary_allowance = params.tau * (static_cast<double>(out.lengths.size()) - owned);
  return out;
}

double rp_lower_bound_rhs(const StepProfile& step, const ModelParams& params, const HStar& star,
                          bool periodic) {
  const double m = params.m_beta;
  double excess = 0.0;
  for (const auto& I : sign_intervals(step, periodic))
    excess += I.length() * (energy_per_length(I.length(), params) - star.e_star);
  double dev = 0.0;
  for (std::size_t i = 0; i < step.pieces(); ++i) {
    const double d = std::abs(step.values()[i]) - m;
    dev += d * d * step.length(i);
  }
  return step.L() * star.e_star + 0.5 * excess + params.F0 / (4.0 * m * m) * dev;
}

double sharp_energy(const StepProfile& step, const ModelParams& params, bool periodic) {
  require_tau(params);
  const double m = params.m_beta;
  for (double v : step.values())
    if (std::abs(std::abs(v) - m) > 1e-12 * m)
      throw ValueError("sharp-interface energy needs values +-m_beta");
  return params.tau * count_sign_changes(step, periodic) + dipole_energy(step, params, periodic);
}

double default_alpha_average(const KacMeasure& measure) {
  double s = 0.0;
  for (const auto& at : measure.atoms()) s += at.weight * at.rate;
  return s;
}

GammaLimitTerms gamma_limit_terms(const GridProfile& u, const ModelParams& params,
                                  double alpha_avg) {
  const double L0 = u.L();
  const std::size_t N = u.size();
  GammaLimitTerms t;
  double tv = 0.0;
  for (std::size_t i = 0; i < N; ++i) tv += std::abs(u[(i + 1) % N] - u[i]);
  t.total_variation = tv;
  const double m = params.m_beta;
  t.surface = params.has_tau() ? params.tau / (2.0 * m) * tv : 0.0;

  const StepProfile s = StepProfile::from_grid(u);
  double mean = s.mean();
  t.mean_zero = std::abs(mean) <= 1e-8;

  // exact Fourier coefficients of the step function, truncated
  const std::size_t P = s.pieces();
  const std::size_t M = std::max<std::size_t>(1 << 14, 64 * P);
  const auto& br = s.breakpoints();
  const auto& val = s.values();
  double sum = 0.0;
  std::vector<std::complex<double>> za(P + 1), step(P + 1);
  for (std::size_t p = 0; p <= P; ++p) {
    const double th = 2.0 * std::numbers::pi * br[p] / L0;
    step[p] = {std::cos(th), -std::sin(th)};
    za[p] = step[p];
  }
  for (std::size_t k = 1; k <= M; ++k) {
    const double kt = 2.0 * std::numbers::pi * static_cast<double>(k) / L0;
    std::complex<double> c = 0.0;
    for (std::size_t p = 0; p < P; ++p) c += val[p] * (za[p] - za[p + 1]);
    c /= std::complex<double>(0.0, kt * L0);
    sum += 2.0 * std::norm(c) / (kt * kt);
    for (std::size_t p = 0; p <= P; ++p) za[p] *= step[p];
  }
  t.long_range = params.measure.lambda() * alpha_avg * L0 * sum;
  t.total = t.mean_zero ? t.surface + t.long_range : std::numeric_limits<double>::infinity();
  return t;
}

double gamma_limit_energy(const GridProfile& u, const ModelParams& params, double alpha_avg) {
  return gamma_limit_terms(u, params, alpha_avg).total;
}

double rescaled_dipole(const StepProfile& u, const ModelParams& params) {
  const double g = params.gamma;
  if (!(g > 0.0)) throw ParameterError("rescaled dipole needs gamma > 0");
  const double scale = std::pow(g, -2.0 / 3.0);
  std::vector<double> br = u.breakpoints();
  for (double& b : br) b *= scale;
  const StepProfile s(br, u.values());
  const double L = s.L(), mu = s.mean();
  // subtract the k = 0 part: (1/2) L mu^2 * (2 lambda sum w / alpha)
  double v0 = 0.0;
  for (const auto& at : params.measure.atoms()) v0 += 2.0 * at.weight / at.rate;
  v0 *= params.measure.lambda();
  return dipole_energy(s, params, true) - 0.5 * L * mu * mu * v0;
}

}  // namespace froth
