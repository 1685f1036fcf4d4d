#pragma once

#include <utility>
#include <vector>

#include <froth/certificate.hpp>
#include <froth/model.hpp>
#include <froth/profile.hpp>

namespace froth {

// lambda m^2 sum_k (w_k/alpha_k) (1 - tanh(x_k)/x_k), x_k = alpha_k gamma h / 2
double long_range_per_length(double h, const ModelParams& params, double m);

// e(h) = tau/h + long_range_per_length(h, m_beta). Needs params.tau.
double energy_per_length(double h, const ModelParams& params);
double energy_per_length_derivative(double h, const ModelParams& params);

double asymptotic_h_star(double tau, double m, double v_prime0, double gamma);
double asymptotic_e_star(double tau, double m, double v_prime0, double gamma);

struct HStar {
  double gamma = 0.0;
  double h_star = 0.0;
  double e_star = 0.0;
  double h_star_asym = 0.0;
  double e_star_asym = 0.0;
  // |ratio - 1| / gamma^{2/3}
  double C_h = 0.0;
  double C_e = 0.0;
};

// Minimizer of e(h) on [gamma^{-1/3}, gamma^{-1}]. Needs gamma in (0, 0.2).
HStar optimal_h(const ModelParams& params);

struct EhCurve {
  double gamma = 0.0;
  double tau = 0.0;
  std::vector<std::pair<double, double>> samples;
  HStar star;
};

// Log-spaced samples of e(h) on [h_lo, h_hi]; defaults to [h*/100, 100/gamma].
EhCurve eh_curve(const ModelParams& params, int n = 200, double h_lo = 0.0, double h_hi = 0.0);

// Three-regime bounds on e(h) - e(h*) and |e'(h)|; searches c', C' over a preset grid.
Certificate check_eh_bounds(const ModelParams& params, int n = 400);

// Antiperiodic-reflected kernel on [0,h] x [0,h], closed form.
double tilde_v_kernel(double h, double x, double y, const ModelParams& params);

// (sigma, sigma) in the tilde_v_h scalar product for a step profile on [0,h].
double tilde_v_quadratic(const StepProfile& sigma, const ModelParams& params);

// (1/h) int F~(sigma) + tau/h + (1/2h)(sigma, sigma)_{tilde v_h}. Throws SignError
// if sigma takes both signs; a negative sigma is flipped.
double cell_specific_energy(const StepProfile& sigma, const ModelParams& params);
double cell_specific_energy(const GridProfile& sigma, const ModelParams& params);

struct ChessboardBound {
  double bound = 0.0;
  std::vector<double> lengths;
  std::vector<double> per_interval;  // h_i * e~_{h_i}
  // tau for every interval that owns no jump of step (open ends, single interval);
  // the antiperiodic extensions charge one jump per interval
  double boundary_allowance = 0.0;
};

ChessboardBound chessboard_lower_bound(const StepProfile& step, const ModelParams& params,
                                       bool periodic = false);

// L e(h*) + 1/2 sum h_j (e(h_j) - e(h*)) + F(0)/(4 m^2) int (|sigma| - m)^2
double rp_lower_bound_rhs(const StepProfile& step, const ModelParams& params, const HStar& star,
                          bool periodic = false);

// tau * jumps + dipole for a profile with values +-m_beta. Throws ValueError otherwise.
double sharp_energy(const StepProfile& step, const ModelParams& params, bool periodic = false);

struct GammaLimitTerms {
  double total_variation = 0.0;
  double surface = 0.0;     // tau/(2 m) TV
  double long_range = 0.0;  // lambda <alpha> L0 sum_{k != 0} |c_k|^2 / k^2
  double total = 0.0;       // +inf when the mean is not zero
  bool mean_zero = true;
};

double default_alpha_average(const KacMeasure& measure);

// Limit functional on the torus [0, L0) for u sampled on a periodic grid.
GammaLimitTerms gamma_limit_terms(const GridProfile& u, const ModelParams& params,
                                  double alpha_avg);
double gamma_limit_energy(const GridProfile& u, const ModelParams& params, double alpha_avg);

// Long-range term of the rescaled functional at finite gamma: the torus dipole energy
// of x -> u(gamma^{2/3} x) on [0, L0 gamma^{-2/3}), minus its k = 0 part.
double rescaled_dipole(const StepProfile& u, const ModelParams& params);

}  // namespace froth
