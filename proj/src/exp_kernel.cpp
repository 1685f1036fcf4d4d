#include <froth/exp_kernel.hpp>

#include <cmath>
#include <numeric>

namespace froth::expk {

double phi2(double x) {
  if (std::abs(x) < 1e-3) {
    // x^2/2 - x^3/6 + x^4/24 - x^5/120
    return x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)));
  }
  return x + std::expm1(-x);
}

void potential(const std::vector<double>& len, const std::vector<double>& val, double kappa,
               std::vector<double>& U) {
  const std::size_t n = len.size();
  U.assign(n, 0.0);
  if (n == 0) return;
  const double k2 = kappa * kappa;
  std::vector<double> e(n), f(n);
  for (std::size_t p = 0; p < n; ++p) {
    e[p] = std::exp(-kappa * len[p]);
    f[p] = -std::expm1(-kappa * len[p]);
  }
  double acc = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    U[p] = val[p] * 2.0 * phi2(kappa * len[p]) / k2 + f[p] * acc / k2;
    acc = acc * e[p] + val[p] * f[p];
  }
  acc = 0.0;
  for (std::size_t p = n; p-- > 0;) {
    U[p] += f[p] * acc / k2;
    acc = acc * e[p] + val[p] * f[p];
  }
}

void potential_uniform(double h, const std::vector<double>& val, double kappa,
                       std::vector<double>& U) {
  const std::size_t n = val.size();
  U.resize(n);
  if (n == 0) return;
  const double k2 = kappa * kappa;
  const double e = std::exp(-kappa * h);
  const double f = -std::expm1(-kappa * h);
  const double self = 2.0 * phi2(kappa * h) / k2;
  const double cross = f / k2;
  double acc = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    U[p] = val[p] * self + cross * acc;
    acc = acc * e + val[p] * f;
  }
  acc = 0.0;
  for (std::size_t p = n; p-- > 0;) {
    U[p] += cross * acc;
    acc = acc * e + val[p] * f;
  }
}

EdgeMoments edge_moments(const std::vector<double>& len, double kappa) {
  const std::size_t n = len.size();
  EdgeMoments m{std::vector<double>(n), std::vector<double>(n)};
  const double L = std::accumulate(len.begin(), len.end(), 0.0);
  double x = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double f = -std::expm1(-kappa * len[p]) / kappa;
    m.a[p] = std::exp(-kappa * x) * f;
    x += len[p];
    m.b[p] = std::exp(-kappa * std::max(L - x, 0.0)) * f;
  }
  return m;
}

}  // namespace froth::expk
