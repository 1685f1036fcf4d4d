#include <froth/model.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <froth/errors.hpp>

namespace froth {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Composite Simpson on [a, b] with n (even) intervals.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

KacMeasure::KacMeasure(std::vector<KacAtom> atoms, double lambda)
    : atoms_(std::move(atoms)), lambda_(lambda) {
  if (atoms_.empty()) throw ValidationError("Kac measure needs at least one atom");
  if (!(lambda_ > 0.0)) throw ValidationError("lambda must be positive");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    const auto& a = atoms_[k];
    if (!(a.weight > 0.0))
      throw ValidationError("atom " + std::to_string(k) + ": weight must be positive");
    if (!(a.rate > 0.0))
      throw ValidationError("atom " + std::to_string(k) + ": rate must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("atom weights must sum to 1 (got " + std::to_string(total) + ")");
}

double KacMeasure::alpha_min() const {
  double m = atoms_.front().rate;
  for (const auto& a : atoms_) m = std::min(m, a.rate);
  return m;
}

ShortRangeKernel::ShortRangeKernel(std::function<double(double)> shape, double J0)
    : shape_(std::move(shape)), J0_(J0) {}

ShortRangeKernel::ShortRangeKernel(std::function<double(double)> shape)
    : shape_(std::move(shape)), J0_(0.0) {
  constexpr int n = 2000;
  double prev = shape_(0.0);
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    const double jp = shape_(x), jm = shape_(-x);
    if (!(jp >= 0.0)) throw ValidationError("J must be nonnegative");
    if (std::abs(jp - jm) > 1e-12 * std::max(1.0, std::abs(jp)))
      throw ValidationError("J must be even");
    if (jp > prev + 1e-14) throw ValidationError("J must be nonincreasing on [0,1]");
    prev = jp;
  }
  J0_ = 2.0 * simpson(shape_, 0.0, 1.0, 20000);
  if (!(J0_ > 0.0)) throw ValidationError("J must have positive integral");
}

ShortRangeKernel ShortRangeKernel::quartic(double J0) {
  if (!(J0 > 0.0)) throw ValidationError("J0 must be positive");
  const double c = 15.0 * J0 / 16.0;
  return ShortRangeKernel(
      [c](double x) {
        if (std::abs(x) >= 1.0) return 0.0;
        const double u = 1.0 - x * x;
        return c * u * u;
      },
      J0);
}

double ShortRangeKernel::operator()(double x) const {
  return std::abs(x) > 1.0 ? 0.0 : shape_(x);
}

std::vector<double> ShortRangeKernel::stencil(double dx) const {
  const double inv = 1.0 / dx;
  const long K = std::lround(inv);
  if (K < 1 || std::abs(inv - static_cast<double>(K)) > 1e-9 * inv)
    throw AlignmentError("dx must divide 1");
  std::vector<double> w(static_cast<std::size_t>(K) + 1);
  double total = 0.0;
  for (long k = 0; k <= K; ++k) {
    w[k] = (*this)(static_cast<double>(k) * dx) * dx;
    total += (k == 0 ? 1.0 : 2.0) * w[k];
  }
  const double scale = J0_ / total;
  for (auto& x : w) x *= scale;
  return w;
}

ModelParams ModelParams::with_gamma(double g) const {
  ModelParams p = *this;
  p.gamma = g;
  return p;
}

ModelParams ModelParams::with_tau(double t) const {
  ModelParams p = *this;
  p.tau = t;
  return p;
}

double solve_m_beta(double beta_J0) {
  if (!(beta_J0 > 1.0))
    throw SubcriticalError("beta*J0 = " + std::to_string(beta_J0) + " <= 1: no positive root");
  auto g = [beta_J0](double m) { return m - std::tanh(beta_J0 * m); };
  double lo = 1e-8, hi = 1.0 - 1e-12;
  // g < 0 just above 0 and g > 0 near 1 in the supercritical regime
  if (g(hi) <= 0.0) return hi;
  if (g(lo) >= 0.0) lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double m = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    const double th = std::tanh(beta_J0 * m);
    const double dg = 1.0 - beta_J0 * (1.0 - th * th);
    if (dg != 0.0) {
      const double next = m - (m - th) / dg;
      if (next > 0.0 && next < 1.0) m = next;
    }
  }
  return m;
}

namespace {

void check_magnetization(double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("magnetization outside [-1,1]");
}

double a_of(double t, double beta, double J0) {
  return -0.5 * J0 * t * t + (xlogx(0.5 * (1.0 + t)) + xlogx(0.5 * (1.0 - t))) / beta;
}

}  // namespace

ModelParams make_params(double beta, ShortRangeKernel kernel, KacMeasure measure,
                        double gamma) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in [0,1)");
  const double m = solve_m_beta(beta * kernel.J0());
  ModelParams p{beta, std::move(kernel), std::move(measure), gamma, m, 0.0};
  p.F0 = eval_F(0.0, p);
  return p;
}

ModelParams default_params(double gamma) {
  return make_params(2.0, ShortRangeKernel::quartic(1.0), KacMeasure::single(1.0, 1.0), gamma);
}

double eval_F(double t, const ModelParams& p) {
  check_magnetization(t);
  const double v = a_of(t, p.beta, p.J0()) - a_of(p.m_beta, p.beta, p.J0());
  return std::max(v, 0.0);
}

double eval_F_prime(double t, const ModelParams& p) {
  check_magnetization(t);
  // atanh diverges at the box edges; clip to keep projected steps finite
  constexpr double edge = 1.0 - 1e-15;
  const double s = std::clamp(t, -edge, edge);
  return -p.J0() * t + std::atanh(s) / p.beta;
}

double eval_F_second(double t, const ModelParams& p) {
  check_magnetization(t);
  const double u = std::max(1.0 - t * t, 1e-300);
  return -p.J0() + 1.0 / (p.beta * u);
}

double eval_tilde_F(double t, const ModelParams& p) {
  check_magnetization(t);
  const double d = std::abs(t) - p.m_beta;
  return p.F0 / (2.0 * p.m_beta * p.m_beta) * d * d;
}

double eval_v(double x, const KacMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * std::exp(-a.rate * std::abs(x));
  return mu.lambda() * s;
}

double eval_v_hat(double k, const KacMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * 2.0 * a.rate / (a.rate * a.rate + k * k);
  return mu.lambda() * s;
}

double v_prime_at_zero(const KacMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * a.rate;
  return mu.lambda() * s;
}

Certificate rp_spectrum_check(const KacMeasure& mu, const std::vector<double>& k_samples) {
  if (k_samples.empty()) throw ParameterError("rp_spectrum_check needs k samples");
  Certificate c;
  c.name = "rp_spectrum";
  double worst = std::numeric_limits<double>::infinity();
  double worst_k = k_samples.front();
  for (double k : k_samples) {
    const double v = eval_v_hat(k, mu);
    if (v < worst) {
      worst = v;
      worst_k = k;
    }
  }
  c.lhs = worst;
  c.rhs = 0.0;
  c.slack = worst;
  c.params = {{"k_at_min", worst_k}, {"samples", static_cast<double>(k_samples.size())}};
  c.pass = worst > 0.0;
  return c;
}

}  // namespace froth
