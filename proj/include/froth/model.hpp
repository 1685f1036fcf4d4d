#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <froth/certificate.hpp>

namespace froth {

struct KacAtom {
  double weight;
  double rate;
};

// Long-range profile v(x) = lambda * sum_k w_k exp(-alpha_k |x|).
class KacMeasure {
 public:
  KacMeasure(std::vector<KacAtom> atoms, double lambda);

  static KacMeasure single(double alpha = 1.0, double lambda = 1.0) {
    return KacMeasure({{1.0, alpha}}, lambda);
  }

  const std::vector<KacAtom>& atoms() const { return atoms_; }
  double lambda() const { return lambda_; }
  double alpha_min() const;

 private:
  std::vector<KacAtom> atoms_;
  double lambda_;
};

// Even compactly supported ferromagnetic kernel J on [-1, 1].
class ShortRangeKernel {
 public:
  // Arbitrary shape; J0 is obtained by quadrature. Throws ValidationError
  // if the shape is not even, nonnegative and nonincreasing on [0, 1].
  explicit ShortRangeKernel(std::function<double(double)> shape);

  // J(x) = c (1 - x^2)^2 with c = 15 J0 / 16.
  static ShortRangeKernel quartic(double J0 = 1.0);

  double operator()(double x) const;
  double J0() const { return J0_; }

  // Weights w_k ~ J(k dx) dx for k = 0..K, K = 1/dx, rescaled so that
  // w_0 + 2 sum_{k>0} w_k = J0 exactly.
  std::vector<double> stencil(double dx) const;

 private:
  ShortRangeKernel(std::function<double(double)> shape, double J0);
  std::function<double(double)> shape_;
  double J0_;
};

struct ModelParams {
  double beta;
  ShortRangeKernel kernel;
  KacMeasure measure;
  double gamma;
  double m_beta;
  double F0;
  double tau = std::numeric_limits<double>::quiet_NaN();

  double J0() const { return kernel.J0(); }
  bool has_tau() const { return std::isfinite(tau); }
  ModelParams with_gamma(double g) const;
  ModelParams with_tau(double t) const;
};

// Builds params, solving for m_beta and F(0). gamma may be 0.
ModelParams make_params(double beta, ShortRangeKernel kernel, KacMeasure measure,
                        double gamma);

// Default model: beta = 2, quartic J with J0 = 1, single atom alpha = 1, lambda = 1.
ModelParams default_params(double gamma = 1e-2);

double solve_m_beta(double beta_J0);

double eval_F(double t, const ModelParams& p);
double eval_F_prime(double t, const ModelParams& p);
double eval_F_second(double t, const ModelParams& p);
double eval_tilde_F(double t, const ModelParams& p);

double eval_v(double x, const KacMeasure& mu);
double eval_v_hat(double k, const KacMeasure& mu);
double v_prime_at_zero(const KacMeasure& mu);

Certificate rp_spectrum_check(const KacMeasure& mu, const std::vector<double>& k_samples);

}  // namespace froth
