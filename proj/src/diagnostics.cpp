#include <froth/diagnostics.hpp>

#include <algorithm>
#include <cmath>

#include <froth/errors.hpp>
#include <froth/io.hpp>
#include <froth/partition.hpp>
#include <froth/sharp_interface.hpp>

namespace froth {

void DiagnosticsConfig::validate() const {
  if (!(delta0 > 0.0 && delta0 < eps0 && eps0 < 1.0 / 3.0))
    throw ParameterError("need 0 < delta0 < eps0 < 1/3");
  if (!(delta1 > delta0 && delta1 < 2.0 / 3.0)) throw ParameterError("need delta0 < delta1 < 2/3");
  if (!(eps > 0.0 && eps < 1.0 / 3.0 + eps0 / 2.0))
    throw ParameterError("eps must lie in (0, 1/3 + eps0/2)");
  if (!(eps_prime > 0.0 && eps_prime < eps0 / 2.0))
    throw ParameterError("eps_prime must lie in (0, eps0/2)");
  if (!(slack > 0.0)) throw ParameterError("slack multiplier must be positive");
  if (histogram_bins < 1) throw ParameterError("histogram needs at least one bin");
}

namespace {

double overlap(const Interval& a, double lo, double hi) {
  return std::max(0.0, std::min(a.b, hi) - std::max(a.a, lo));
}

// Overlap with a sign interval that may wrap past L.
double overlap_wrapped(const Interval& blk, const SignInterval& H, double L) {
  double o = overlap(blk, H.a, std::min(H.b, L));
  if (H.b > L) o += overlap(blk, 0.0, H.b - L);
  return o;
}

}  // namespace

StructureReport good_set(const GridProfile& phi, const StepProfile& sigma,
                         const ModelParams& params, const DiagnosticsConfig& cfg, double h_star,
                         bool periodic) {
  cfg.validate();
  const double g = params.gamma, L = phi.L(), m = params.m_beta;
  if (std::abs(sigma.L() - L) > 1e-9 * L) throw ValueError("sigma and phi live on different domains");
  StructureReport r;
  r.config = cfg;
  r.gamma = g;
  r.L = L;
  r.h_star = h_star;

  const double min_h = std::pow(g, -cfg.delta1);
  const auto H = sign_intervals(sigma, periodic);
  std::vector<SignInterval> short_ones;
  for (const auto& h : H) {
    if (h.length() >= min_h) r.long_intervals.push_back({h.a, h.b});
    else short_ones.push_back(h);
  }

  const auto part = snap_to_grid(regular_partition(L, cfg.delta0, g, PartitionKind::regular_delta0),
                                 phi.dx());
  const std::size_t n = part.size();
  std::vector<bool> in_W(n, false);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& h : short_ones)
      if (overlap_wrapped(part.block(i), h, L) > 1e-9) in_W[i] = true;

  for (std::size_t i = 0; i < n;) {
    if (in_W[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !in_W[j]) ++j;
    r.components.push_back({part.lines[i], part.lines[j]});
    i = j;
  }
  const double min_comp = std::pow(g, -2.0 / 3.0 - cfg.eps0 / 2.0);
  for (const auto& c : r.components)
    if (c.length() >= min_comp) {
      r.good_set.push_back(c);
      r.good_measure += c.length();
    }
  r.bad_measure = L - r.good_measure;
  r.Gc_bound = 16.0 / params.tau * L * std::pow(g, cfg.eps0 / 2.0);
  r.Gc_pass = r.bad_measure <= cfg.slack * r.Gc_bound;

  // runs of constant type inside each good component
  std::vector<double> mean(n);
  for (std::size_t i = 0; i < n; ++i) mean[i] = average_over(phi, part.block(i));
  for (const auto& c : r.good_set) {
    std::size_t i = 0;
    while (i < n && part.lines[i] < c.a - 1e-9) ++i;
    std::size_t end = i;
    while (end < n && part.lines[end + 1] <= c.b + 1e-9) ++end;
    while (i < end) {
      const BlockType t = block_type(mean[i], m);
      if (t == BlockType::zero) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < end && block_type(mean[j], m) == t) ++j;
      Run run;
      run.I = {part.lines[i], part.lines[j]};
      run.sign = t == BlockType::plus ? 1 : -1;
      run.blocks = static_cast<int>(j - i);
      run.interior = run.blocks > 2 ? Interval{part.lines[i + 1], part.lines[j - 1]}
                                    : Interval{part.lines[i], part.lines[i]};
      for (std::size_t k = i + 1; k + 1 < j; ++k) {
        const double d = std::abs(mean[k]) - m;
        r.tildeF_interior += d * d * part.block(k).length();
      }
      r.runs.push_back(run);
      i = j;
    }
  }
  return r;
}

void defect_sets(StructureReport& r, const GridProfile& phi, const ModelParams& params, double eps,
                 double eps_prime) {
  const double e0 = r.config.eps0;
  if (!(eps > 0.0 && eps < 1.0 / 3.0 + e0 / 2.0)) throw ParameterError("eps must lie in (0, 1/3 + eps0/2)");
  if (!(eps_prime > 0.0 && eps_prime < e0 / 2.0)) throw ParameterError("eps_prime must lie in (0, eps0/2)");
  const double g = r.gamma, m = params.m_beta;
  const auto part = snap_to_grid(
      regular_partition(r.L, r.config.delta0, g, PartitionKind::regular_delta0), phi.dx());
  const double tol1 = std::pow(g, eps), tol2 = r.h_star * std::pow(g, eps_prime);
  r.X1 = 0.0;
  r.X2 = 0.0;
  for (const auto& run : r.runs) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      const Interval b = part.block(i);
      if (b.a < run.interior.a - 1e-9 || b.b > run.interior.b + 1e-9) continue;
      if (std::abs(std::abs(average_over(phi, b)) - m) >= tol1) r.X1 += b.length();
    }
    if (std::abs(run.I.length() - r.h_star) >= tol2) r.X2 += run.I.length();
  }
}

double l_wrong(const StepProfile& step, double h_star, double eps, double gamma, bool periodic) {
  const double tol = h_star * std::pow(gamma, eps);
  double s = 0.0;
  for (const auto& h : sign_intervals(step, periodic))
    if (std::abs(h.length() - h_star) >= tol) s += h.length();
  return s;
}

ExcessDecomposition excess_energy_decomposition(const StepProfile& step, const ModelParams& params,
                                                double e_star, bool periodic) {
  ExcessDecomposition d;
  for (const auto& h : sign_intervals(step, periodic)) {
    const double v = h.length() * (energy_per_length(h.length(), params) - e_star);
    d.per_interval.push_back(v);
    d.excess_sum += v;
  }
  const double m = params.m_beta;
  for (std::size_t i = 0; i < step.pieces(); ++i) {
    const double dv = std::abs(step.values()[i]) - m;
    d.tildeF_integral += dv * dv * step.length(i);
  }
  d.lhs = 0.5 * d.excess_sum + params.F0 / (4.0 * m * m) * d.tildeF_integral;
  return d;
}

std::vector<HistogramBin> interval_histogram(const StepProfile& step, int bins, double h_max,
                                             bool periodic) {
  if (bins < 1 || !(h_max > 0.0)) throw ParameterError("histogram needs bins >= 1 and h_max > 0");
  std::vector<HistogramBin> out;
  const double w = h_max / bins;
  for (int k = 0; k < bins; ++k) out.push_back({k * w, (k + 1) * w, 0.0});
  for (const auto& h : sign_intervals(step, periodic)) {
    const int k = std::min(bins - 1, static_cast<int>(h.length() / w));
    out[static_cast<std::size_t>(k)].total_length += h.length();
  }
  return out;
}

StructureReport structure_report(const GridProfile& phi, const StepProfile& sigma,
                                 const ModelParams& params, const DiagnosticsConfig& cfg,
                                 bool periodic) {
  const HStar st = optimal_h(params);
  StructureReport r = good_set(phi, sigma, params, cfg, st.h_star, periodic);
  defect_sets(r, phi, params, cfg.eps, cfg.eps_prime);
  r.L_wrong = l_wrong(sigma, st.h_star, cfg.eps_prime, params.gamma, periodic);
  r.excess = excess_energy_decomposition(sigma, params, st.e_star, periodic);
  r.histogram = interval_histogram(sigma, cfg.histogram_bins, 4.0 * st.h_star, periodic);
  return r;
}

nlohmann::json to_json(const StructureReport& r) {
  auto iv = [](const Interval& I) { return nlohmann::json::array({I.a, I.b}); };
  nlohmann::json good = nlohmann::json::array(), comps = nlohmann::json::array(),
                 runs = nlohmann::json::array(), hist = nlohmann::json::array();
  for (const auto& c : r.good_set) good.push_back(iv(c));
  for (const auto& c : r.components) comps.push_back(iv(c));
  for (const auto& run : r.runs)
    runs.push_back({{"interval", iv(run.I)},
                    {"sign", run.sign},
                    {"length", run.I.length()},
                    {"blocks", run.blocks},
                    {"interior", iv(run.interior)}});
  for (const auto& b : r.histogram)
    hist.push_back({{"bin_left", b.left}, {"bin_right", b.right}, {"total_length", b.total_length}});
  const auto& c = r.config;
  return {{"parameters",
           {{"gamma", r.gamma},
            {"delta0", c.delta0},
            {"delta1", c.delta1},
            {"eps0", c.eps0},
            {"eps", c.eps},
            {"eps_prime", c.eps_prime}}},
          {"L", r.L},
          {"h_star", r.h_star},
          {"components", comps},
          {"good_set", good},
          {"good_measure", r.good_measure},
          {"bad_measure", r.bad_measure},
          {"Gc_bound", r.Gc_bound},
          {"Gc_slack", c.slack},
          {"Gc_pass", r.Gc_pass},
          {"runs", runs},
          {"X1", r.X1},
          {"X2", r.X2},
          {"L_wrong", r.L_wrong},
          {"tildeF_integral", r.tildeF_interior},
          {"excess",
           {{"excess_sum", r.excess.excess_sum},
            {"tildeF_integral", r.excess.tildeF_integral},
            {"lhs", r.excess.lhs},
            {"per_interval", r.excess.per_interval}}},
          {"histogram", hist}};
}

void write_histogram_csv(const std::string& path, const std::vector<HistogramBin>& h,
                         const std::string& config_hash) {
  CsvWriter w({"bin_left", "bin_right", "total_length"}, config_hash);
  for (const auto& b : h) w.row({b.left, b.right, b.total_length});
  w.save(path);
}

}  // namespace froth
