#pragma once

#include <froth/model.hpp>
#include <froth/profile.hpp>

namespace froth {

struct InstantonOptions {
  double W = 30.0;
  double dx = 1.0 / 64.0;
  double tol = 1e-10;
  long max_sweeps = 200000;
  // q <- (1 - damping) T(q) + damping q; 0 is plain Picard
  double damping = 0.0;
  enum class Init { tanh, sign } init = Init::tanh;
};

struct TailFit {
  double rate = 0.0;
  double residual = 0.0;  // rms of the log-linear fit
  double x_lo = 0.0;
  double x_hi = 0.0;
  int samples = 0;
};

// Antisymmetric front q on [-W, W], stored as a grid on [0, 2W] with
// exterior cells fixed at -m_beta / +m_beta.
struct Instanton {
  GridProfile profile;
  double W = 0.0;
  double m_beta = 0.0;
  double tau = 0.0;
  double residual = 0.0;
  long sweeps = 0;
  TailFit tail;

  // Linear interpolation between samples, +-m_beta beyond the window.
  double operator()(double x) const;
  double x(std::size_t i) const { return profile.x(i) - W; }
};

Instanton solve_instanton(const ModelParams& params, const InstantonOptions& opt = {});

// sup |q - tanh(beta J*q)| of the stored samples.
double fixed_point_residual(const Instanton& q, const ModelParams& params);

// Short-range energy of q extended by the constants +-m_beta.
double surface_tension(const Instanton& q, const ModelParams& params);

// Exponential rate of |q(x) - m_beta| on the right tail. Uses [W/2, W-2]
// when the deviation is resolvable there, otherwise the last stretch where
// it lies in [floor, 1e-3]. Throws FitError if the window is too short.
TailFit tail_rate(const Instanton& q, double floor = 0.0);

// Smallest x > 0 with |q(x)| >= 0.999 m_beta.
double instanton_half_width(const Instanton& q);

// phi*(x) = (-1)^floor(x/h) q(x - h (floor(x/h) + 1/2)) sampled at spacing dx.
GridProfile build_trial_profile(double h, double L, const Instanton& q, double dx,
                                BoundaryKind bc = BoundaryKind::periodic);

}  // namespace froth
