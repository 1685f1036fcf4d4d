#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <froth/energy.hpp>
#include <froth/model.hpp>
#include <froth/profile.hpp>

namespace froth {

struct MinimizeOptions {
  long max_iters = 200000;
  double grad_tol = 1e-8;
  double step0 = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double grow = 1.5;
  double max_step = 1e3;
  int restarts = 1;
  std::uint64_t seed = 0;
  // record every n-th accepted iterate in the trace (0 disables the trace)
  long trace_every = 1;
  // after convergence, try flipping the shortest sign domain and keep the
  // result when the energy drops; bounded number of attempts
  int merge_moves = 0;
  // descent budget of each merge trial; the survivor is then polished with max_iters
  long merge_iters = 5000;

  void validate() const;
};

struct TraceRow {
  long iter;
  double energy;
  double grad_norm;
  double step;
};

enum class MinimizeStatus { converged, max_iters, stalled };
std::string to_string(MinimizeStatus s);

struct MinimizeResult {
  GridProfile profile;
  EnergyBreakdown energy;
  double grad_norm = 0.0;
  long iters = 0;
  MinimizeStatus status = MinimizeStatus::max_iters;
  int merges_accepted = 0;
  std::vector<TraceRow> trace;
};

// Projected gradient with Armijo backtracking on the box [-1, 1]^N, bc and
// grid taken from init. grad_norm is sup |x - P(x - g)|. With merge moves,
// iters and the trace count the accepted trials and the final polish.
MinimizeResult minimize_energy(const GridProfile& init, const ModelParams& params,
                               const MinimizeOptions& opt = {});

// Same on the slice { mean = m } intersected with the box.
MinimizeResult minimize_with_mean_constraint(const GridProfile& init, double m,
                                             const ModelParams& params,
                                             const MinimizeOptions& opt = {});

// Euclidean projection of y onto { x in [-1,1]^N : mean(x) = m }.
std::vector<double> project_mean_box(const std::vector<double>& y, double m);

// Counter-based generator: independent stream per (seed, index).
std::uint64_t splitmix64(std::uint64_t x);
std::vector<double> random_samples(std::uint64_t seed, std::uint64_t index, std::size_t n);

struct MultistartResult {
  MinimizeResult best;
  std::size_t best_index = 0;
  std::vector<double> energies;
  std::vector<MinimizeStatus> statuses;
};

// n_starts uniform random inits on [0, L] with the given bc. Restarts run in
// parallel; the result depends only on the seed.
MultistartResult multistart(const ModelParams& params, double L, double dx, BoundaryKind bc,
                            int n_starts, const MinimizeOptions& opt = {});

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     const std::string& config_hash);

}  // namespace froth
