#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <froth/coarsegrain.hpp>
#include <froth/diagnostics.hpp>
#include <froth/instanton.hpp>
#include <froth/minimize.hpp>
#include <froth/model.hpp>
#include <froth/profile.hpp>

namespace froth {

struct ModelConfig {
  double beta = 2.0;
  double J0_hat = 1.0;
  double lambda = 1.0;
  std::vector<KacAtom> measure{{1.0, 1.0}};
  double gamma = 1e-2;
  std::optional<double> tau;
};

struct EhConfig {
  int samples = 200;
  double h_lo = 0.0;  // 0 picks the default range
  double h_hi = 0.0;
  int bound_samples = 400;
};

struct MinimizeRunConfig {
  double L = 0.0;        // 0 means periods * h*
  double periods = 10.0;
  double dx = 0.125;
  BoundaryKind bc = BoundaryKind::periodic;
  int starts = 8;
  MinimizeOptions options = defaults();

  static MinimizeOptions defaults() {
    MinimizeOptions o;
    o.max_iters = 20000;
    o.merge_moves = 32;
    o.trace_every = 100;
    return o;
  }
};

struct CoarseGrainRunConfig {
  CoarseGrainConfig cg;
  double C_cert = 10.0;
  std::string input;  // profile path; empty means <out>/minimizer.profile
};

struct VerifyConfig {
  std::string input;  // profile path; empty means trial profile
  double trial_periods = 8.0;
  double dx = 0.125;
  double gradient_tol = 1e-6;
};

struct RunConfig {
  ModelConfig model;
  InstantonOptions instanton;
  EhConfig eh;
  MinimizeRunConfig minimize;
  CoarseGrainRunConfig coarsegrain;
  DiagnosticsConfig diagnostics;
  VerifyConfig verify;
  std::string output_dir = ".";
  std::uint64_t seed = 0;

  nlohmann::json source;  // the document as parsed, with the seed override applied

  ModelParams params() const;
  std::string hash() const;
};

// Throws ConfigError carrying the JSON pointer of the offending entry.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json default_config_json();

}  // namespace froth
