#pragma once

#include <vector>

#include <json.hpp>

#include <froth/model.hpp>
#include <froth/profile.hpp>

namespace froth {

struct EnergyBreakdown {
  double local = 0.0;
  double exchange = 0.0;
  double dipole = 0.0;
  double boundary = 0.0;
  double total = 0.0;
};

nlohmann::json to_json(const EnergyBreakdown& e);

struct EnergyOptions {
  // Custom exterior data must reach gamma * alpha_min * distance >= this.
  // Zero disables the check (the data is then used as far as it goes).
  double custom_dipole_cutoff = 46.0;
};

// Discretized functional on a fixed grid and boundary condition. Energies and
// gradients act on raw sample vectors; the gradient is per-sample dE/dphi_i / dx.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const ModelParams& params, double L, double dx, BoundaryKind bc,
                  const CustomBoundary& custom = {}, const EnergyOptions& opt = {});
  explicit EnergyEvaluator(const GridProfile& p, const ModelParams& params,
                           const EnergyOptions& opt = {});

  EnergyBreakdown energy(const std::vector<double>& phi) const;
  EnergyBreakdown energy_and_gradient(const std::vector<double>& phi,
                                      std::vector<double>& grad) const;

  std::size_t size() const { return N_; }
  double dx() const { return dx_; }

 private:
  struct Atom {
    double c;      // lambda * weight
    double kappa;  // gamma * alpha
    std::vector<double> a, b;
    double edge;   // e^{-kappa L}
    double P_left = 0.0, P_right = 0.0;
  };
  EnergyBreakdown compute(const std::vector<double>& phi, std::vector<double>* grad) const;
  double out_value(long j, const std::vector<double>& phi, long* src) const;

  ModelParams params_;
  double L_, dx_;
  std::size_t N_;
  BoundaryKind bc_;
  CustomBoundary custom_;
  std::vector<double> w_;
  long K_;
  std::vector<Atom> atoms_;
};

EnergyBreakdown total_energy(const GridProfile& p, const ModelParams& params,
                             const EnergyOptions& opt = {});
std::vector<double> energy_gradient(const GridProfile& p, const ModelParams& params,
                                    const EnergyOptions& opt = {});

// int_I F(phi) + 1/4 int_I int_I J (phi(x) - phi(y))^2 on a grid-aligned interval.
double short_range_energy(const GridProfile& p, const ModelParams& params, const Interval& I);
// Same on the cell range [i0, i1), with a precomputed stencil.
double short_range_energy_cells(const std::vector<double>& phi, std::size_t i0, std::size_t i1,
                                double dx, const std::vector<double>& stencil,
                                const ModelParams& params);

// (gamma/2) int int phi v(gamma(x-y)) phi over [0,L] only.
double dipole_energy(const GridProfile& p, const ModelParams& params);
// Step-profile version; periodic uses the torus kernel.
double dipole_energy(const StepProfile& s, const ModelParams& params, bool periodic = false);

// Number of sign changes of a step profile (zero pieces skipped).
int count_sign_changes(const StepProfile& s, bool periodic = false);

// int F~(sigma) + tau * (sign changes) + dipole. Needs params.tau.
double tilde_energy(const StepProfile& s, const ModelParams& params, bool periodic = false);

}  // namespace froth
