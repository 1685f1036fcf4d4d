#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include <froth/model.hpp>
#include <froth/profile.hpp>

namespace froth {

struct DiagnosticsConfig {
  double delta0 = 0.1;
  double delta1 = 0.4;
  double eps0 = 0.2;
  double eps = 0.2;
  double eps_prime = 0.05;
  // multiplier on the |G^c| bound before it is declared failed
  double slack = 4.0;
  int histogram_bins = 20;

  void validate() const;
};

struct Run {
  Interval I;
  int sign = 0;
  int blocks = 0;
  Interval interior;  // I without its first and last block (may be empty)
};

struct HistogramBin {
  double left;
  double right;
  double total_length;
};

struct ExcessDecomposition {
  std::vector<double> per_interval;  // h_j (e(h_j) - e(h*))
  double excess_sum = 0.0;
  double tildeF_integral = 0.0;      // int (|sigma| - m_beta)^2
  // 1/2 excess_sum + F(0)/(4 m^2) tildeF_integral
  double lhs = 0.0;
};

struct StructureReport {
  DiagnosticsConfig config;
  double gamma = 0.0;
  double L = 0.0;
  double h_star = 0.0;
  std::vector<Interval> long_intervals;  // H_j with h_j >= gamma^{-delta1}
  std::vector<Interval> components;      // Lambda_k, all of them
  std::vector<Interval> good_set;        // Lambda_k kept by the length filter
  double good_measure = 0.0;
  double bad_measure = 0.0;
  std::vector<Run> runs;
  double X1 = 0.0;
  double X2 = 0.0;
  double L_wrong = 0.0;
  double tildeF_interior = 0.0;  // int over int I_j of (|psi| - m)^2
  ExcessDecomposition excess;
  std::vector<HistogramBin> histogram;
  double Gc_bound = 0.0;         // 16/tau L gamma^{eps0/2}
  bool Gc_pass = false;
};

// Builds G_phi and the runs I_j from the coarse version of phi and sigma_phi.
StructureReport good_set(const GridProfile& phi, const StepProfile& sigma,
                         const ModelParams& params, const DiagnosticsConfig& cfg,
                         double h_star, bool periodic = false);

// Fills X1 and X2 of a report for the given exponents.
void defect_sets(StructureReport& r, const GridProfile& phi, const ModelParams& params,
                 double eps, double eps_prime);

// Sum of h_j over constant-sign intervals with |h_j - h*| >= h* gamma^eps.
double l_wrong(const StepProfile& step, double h_star, double eps, double gamma,
               bool periodic = false);

ExcessDecomposition excess_energy_decomposition(const StepProfile& step, const ModelParams& params,
                                                double e_star, bool periodic = false);

std::vector<HistogramBin> interval_histogram(const StepProfile& step, int bins, double h_max,
                                             bool periodic = false);

// good_set, defect_sets, excess, histogram and L_wrong in one report.
StructureReport structure_report(const GridProfile& phi, const StepProfile& sigma,
                                 const ModelParams& params, const DiagnosticsConfig& cfg,
                                 bool periodic = false);

nlohmann::json to_json(const StructureReport& r);
void write_histogram_csv(const std::string& path, const std::vector<HistogramBin>& h,
                         const std::string& config_hash);

}  // namespace froth
