#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include <froth/coarsegrain.hpp>
#include <froth/diagnostics.hpp>
#include <froth/energy.hpp>
#include <froth/errors.hpp>
#include <froth/instanton.hpp>
#include <froth/io.hpp>
#include <froth/minimize.hpp>
#include <froth/sharp_interface.hpp>

namespace froth::cli {

namespace {

using nlohmann::json;

std::string path_in(const Context& ctx, const std::string& name) {
  return (ctx.out / name).string();
}

json with_meta(const Context& ctx, json j) {
  j["config_hash"] = ctx.config.hash();
  j["config"] = ctx.config.source;
  return j;
}

std::vector<std::pair<std::string, std::string>> meta_extras(const Context& ctx) {
  return {{"config_hash", ctx.config.hash()}};
}

// tau from the config, else from a previous instanton run, else solved here.
ModelParams params_with_tau(const Context& ctx, std::ostream& log) {
  ModelParams p = ctx.config.params();
  if (p.has_tau()) return p;
  const std::string cached = path_in(ctx, "instanton.json");
  if (std::filesystem::exists(cached)) {
    std::ifstream in(cached);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError(cached + ": " + e.what());
    }
    if (!j.contains("tau") || !j["tau"].is_number()) throw ParseError(cached + ": no tau");
    if (j.value("model_hash", "") == config_hash(ctx.config.source["model"]))
      return p.with_tau(j["tau"].get<double>());
  }
  log << "solving instanton for tau\n";
  return p.with_tau(solve_instanton(p, ctx.config.instanton).tau);
}

double instanton_tau(const Context& ctx) {
  return solve_instanton(ctx.config.params(), ctx.config.instanton).tau;
}

double antisymmetry(const Instanton& q) {
  const auto& s = q.profile.samples();
  double a = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) a = std::max(a, std::abs(s[i] + s[s.size() - 1 - i]));
  return a;
}

GridProfile input_profile(const Context& ctx, const std::string& configured) {
  const std::string path = configured.empty() ? path_in(ctx, "minimizer.profile") : configured;
  return load_profile(path);
}

GridProfile trial_profile(const Context& ctx, const ModelParams& p, const HStar& st) {
  const auto& v = ctx.config.verify;
  const Instanton q = solve_instanton(p, ctx.config.instanton);
  const double L = std::round(v.trial_periods * st.h_star / v.dx) * v.dx;
  return build_trial_profile(L / v.trial_periods, L, q, v.dx, BoundaryKind::periodic);
}

Certificate appendix_a_check(const ModelParams& p) {
  const double m = p.m_beta;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2000; ++i) {
    const double t = -1.0 + i * 1e-3;
    const double d = std::abs(t) - m;
    worst = std::min(worst, eval_F(t, p) - p.F0 / (m * m) * d * d);
  }
  Certificate c;
  c.name = "free_energy_quadratic_bound";
  c.lhs = worst;
  c.rhs = -1e-12;
  c.slack = c.lhs - c.rhs;
  c.params = {{"samples", 2001.0}, {"F0", p.F0}, {"m_beta", m}};
  c.pass = c.slack >= 0.0;
  return c;
}

Certificate gradient_check(const GridProfile& phi, const ModelParams& p, double tol) {
  const EnergyEvaluator ev(phi, p);
  std::vector<double> x = phi.samples(), g;
  ev.energy_and_gradient(x, g);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  const double eps = 1e-6;
  double worst = 0.0;
  const std::size_t n = x.size(), stride = std::max<std::size_t>(1, n / 16);
  for (std::size_t i = 0; i < n; i += stride) {
    const double x0 = x[i];
    const double up = std::min(1.0, x0 + eps), dn = std::max(-1.0, x0 - eps);
    x[i] = up;
    const double Eu = ev.energy(x).total;
    x[i] = dn;
    const double Ed = ev.energy(x).total;
    x[i] = x0;
    const double fd = (Eu - Ed) / (up - dn) / phi.dx();
    worst = std::max(worst, std::abs(fd - g[i]));
  }
  Certificate c;
  c.name = "gradient_check";
  c.lhs = worst / std::max(1.0, gmax);
  c.rhs = tol;
  c.slack = c.rhs - c.lhs;
  c.params = {{"max_grad", gmax}, {"fd_step", eps}};
  c.pass = c.slack >= 0.0;
  return c;
}

// e~_h of the constant cell sigma = m_beta with the configured tau against
// e(h) with the instanton tension.
Certificate cell_identity(const ModelParams& p, double tau_inst, double h) {
  const StepProfile cell({0.0, h}, {p.m_beta});
  const double lhs = cell_specific_energy(cell, p);
  const double rhs = energy_per_length(h, p.with_tau(tau_inst));
  Certificate c;
  c.name = "cell_energy_identity";
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = std::abs(lhs - rhs) / std::abs(rhs);
  c.params = {{"h", h}, {"tau_used", p.tau}, {"tau_instanton", tau_inst}};
  c.pass = c.slack <= 1e-10;
  return c;
}

Certificate chessboard_check(const StepProfile& s, const ModelParams& p) {
  const double Et = tilde_energy(s, p, false);
  const ChessboardBound cb = chessboard_lower_bound(s, p, false);
  Certificate c;
  c.name = "chessboard";
  c.lhs = Et;
  c.rhs = cb.bound - cb.boundary_allowance;
  c.slack = (c.lhs - c.rhs) / s.L();
  c.params = {{"intervals", static_cast<double>(cb.lengths.size())},
              {"L", s.L()},
              {"bound", cb.bound},
              {"boundary_allowance", cb.boundary_allowance}};
  c.pass = c.slack >= -1e-9;
  return c;
}

Certificate rp_bound_check(const StepProfile& s, const ModelParams& p, const HStar& st,
                           double C) {
  const double Et = tilde_energy(s, p, false);
  const double rhs = rp_lower_bound_rhs(s, p, st, false);
  const double corr = C * std::pow(p.gamma, 4.0 / 3.0) * s.L();
  Certificate c;
  c.name = "rp_lower_bound";
  c.lhs = Et;
  c.rhs = rhs - corr;
  c.slack = c.lhs - c.rhs;
  c.params = {{"C", C},
              {"C_fit", std::max(0.0, (rhs - Et) / (std::pow(p.gamma, 4.0 / 3.0) * s.L()))},
              {"L", s.L()}};
  c.pass = c.slack >= 0.0;
  return c;
}

}  // namespace

void cmd_instanton(const Context& ctx, std::ostream& log) {
  const ModelParams p = ctx.config.params();
  const Instanton q = solve_instanton(p, ctx.config.instanton);
  const json j = with_meta(ctx, {{"tau", q.tau},
                                 {"m_beta", q.m_beta},
                                 {"W", q.W},
                                 {"dx", q.profile.dx()},
                                 {"residual", q.residual},
                                 {"sweeps", q.sweeps},
                                 {"antisymmetry", antisymmetry(q)},
                                 {"half_width", instanton_half_width(q)},
                                 {"tail",
                                  {{"rate", q.tail.rate},
                                   {"residual", q.tail.residual},
                                   {"x_lo", q.tail.x_lo},
                                   {"x_hi", q.tail.x_hi},
                                   {"samples", q.tail.samples}}},
                                 {"model_hash", config_hash(ctx.config.source["model"])}});
  auto extras = meta_extras(ctx);
  extras.push_back({"tau", format17(q.tau)});
  extras.push_back({"tail_rate", format17(q.tail.rate)});
  extras.push_back({"W", format17(q.W)});
  save_profile(path_in(ctx, "instanton.profile"), q.profile, extras, "instanton on [0, 2W]");
  write_json(path_in(ctx, "instanton.json"), j);
  log << "tau = " << format17(q.tau) << " after " << q.sweeps << " sweeps\n";
}

void cmd_eh_curve(const Context& ctx, std::ostream& log) {
  const ModelParams p = params_with_tau(ctx, log);
  const auto& e = ctx.config.eh;
  const EhCurve curve = eh_curve(p, e.samples, e.h_lo, e.h_hi);
  CsvWriter w({"h", "e_h", "e_h_minus_estar"}, ctx.config.hash());
  for (const auto& [h, v] : curve.samples) w.row({h, v, v - curve.star.e_star});
  w.save(path_in(ctx, "eh.csv"));
  const HStar& s = curve.star;
  const Certificate bounds = check_eh_bounds(p, e.bound_samples);
  write_json(path_in(ctx, "hstar.json"),
             with_meta(ctx, {{"gamma", s.gamma},
                             {"tau", p.tau},
                             {"h_star", s.h_star},
                             {"e_star", s.e_star},
                             {"h_star_asym", s.h_star_asym},
                             {"e_star_asym", s.e_star_asym},
                             {"C_h", s.C_h},
                             {"C_e", s.C_e},
                             {"bounds", to_json(bounds)}}));
  log << "h* = " << format17(s.h_star) << ", e(h*) = " << format17(s.e_star) << "\n";
}

void cmd_minimize(const Context& ctx, std::ostream& log) {
  const ModelParams p = params_with_tau(ctx, log);
  const auto& m = ctx.config.minimize;
  const HStar st = optimal_h(p);
  const double L0 = m.L > 0.0 ? m.L : m.periods * st.h_star;
  const double L = std::max(1.0, std::round(L0 / m.dx)) * m.dx;
  const MultistartResult r = multistart(p, L, m.dx, m.bc, m.starts, m.options);
  const MinimizeResult& b = r.best;
  json statuses = json::array();
  for (auto s : r.statuses) statuses.push_back(to_string(s));
  write_json(path_in(ctx, "minimize.json"),
             with_meta(ctx, {{"L", L},
                             {"dx", m.dx},
                             {"bc", to_string(m.bc)},
                             {"h_star", st.h_star},
                             {"best_index", r.best_index},
                             {"energies", r.energies},
                             {"statuses", statuses},
                             {"energy", to_json(b.energy)},
                             {"energy_per_length", b.energy.total / L},
                             {"e_star", st.e_star},
                             {"grad_norm", b.grad_norm},
                             {"iters", b.iters},
                             {"status", to_string(b.status)},
                             {"merges_accepted", b.merges_accepted}}));
  auto extras = meta_extras(ctx);
  extras.push_back({"energy", format17(b.energy.total)});
  save_profile(path_in(ctx, "minimizer.profile"), b.profile, extras);
  write_trace_csv(path_in(ctx, "trace.csv"), b.trace, ctx.config.hash());
  log << "best energy per length " << format17(b.energy.total / L) << " (e* = "
      << format17(st.e_star) << "), status " << to_string(b.status) << "\n";
}

void cmd_coarse_grain(const Context& ctx, std::ostream& log) {
  const ModelParams p = params_with_tau(ctx, log);
  const auto& c = ctx.config.coarsegrain;
  const GridProfile phi = input_profile(ctx, c.input);
  const CoarseGrainResult r = coarse_grain(phi, p, c.cg);
  const Certificate cert = lower_bound_certificate(phi, p, c.cg, c.C_cert);
  json j = trace_json(r);
  j["certificate"] = to_json(cert);
  write_json(path_in(ctx, "coarse_grain.json"), with_meta(ctx, j));
  CsvWriter w({"a", "b", "value"}, ctx.config.hash());
  const auto& br = r.sigma.breakpoints();
  for (std::size_t i = 0; i < r.sigma.pieces(); ++i) w.row({br[i], br[i + 1], r.sigma.values()[i]});
  w.save(path_in(ctx, "sigma.csv"));
  log << r.sigma.pieces() << " pieces, in_K " << (r.in_K ? "yes" : "no") << ", residual "
      << format17(cert.lhs) << "\n";
}

void cmd_verify(const Context& ctx, std::ostream& log) {
  const ModelParams p = params_with_tau(ctx, log);
  const auto& v = ctx.config.verify;
  const HStar st = optimal_h(p);
  const double tau_inst = instanton_tau(ctx);
  const GridProfile phi = v.input.empty() ? trial_profile(ctx, p, st) : load_profile(v.input);
  const CoarseGrainResult cg = coarse_grain(phi, p, ctx.config.coarsegrain.cg);

  std::vector<double> ks;
  for (int i = 0; i <= 60; ++i) ks.push_back(std::pow(10.0, -3.0 + 0.1 * i));
  std::vector<Certificate> certs;
  certs.push_back(rp_spectrum_check(p.measure, ks));
  certs.push_back(appendix_a_check(p));
  certs.push_back(gradient_check(phi, p, v.gradient_tol));
  certs.push_back(cell_identity(p, tau_inst, st.h_star));
  certs.push_back(check_eh_bounds(p, ctx.config.eh.bound_samples));
  certs.push_back(chessboard_check(cg.sigma, p));
  certs.push_back(rp_bound_check(cg.sigma, p, st, 10.0));
  certs.push_back(lower_bound_certificate(phi, p, ctx.config.coarsegrain.cg,
                                          ctx.config.coarsegrain.C_cert));

  json arr = json::array();
  std::vector<std::string> failed;
  for (const auto& c : certs) {
    arr.push_back(to_json(c));
    log << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
    if (!c.pass) failed.push_back(c.name);
  }
  write_json(path_in(ctx, "verify.json"),
             with_meta(ctx, {{"certificates", arr}, {"failed", failed}, {"L", phi.L()}}));
  if (!failed.empty()) {
    std::string names;
    for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
    throw CertificateFailure("certificate failure: " + names);
  }
}

void cmd_report(const Context& ctx, std::ostream& log) {
  const ModelParams p = params_with_tau(ctx, log);
  const GridProfile phi = input_profile(ctx, ctx.config.coarsegrain.input);
  const StepProfile sigma = coarse_grain(phi, p, ctx.config.coarsegrain.cg).sigma;
  const bool periodic = phi.bc() == BoundaryKind::periodic;
  const StructureReport r = structure_report(phi, sigma, p, ctx.config.diagnostics, periodic);
  write_json(path_in(ctx, "report.json"), with_meta(ctx, to_json(r)));
  write_histogram_csv(path_in(ctx, "histogram.csv"), r.histogram, ctx.config.hash());
  log << "good set " << format17(r.good_measure) << " of " << format17(r.L) << ", L_wrong "
      << format17(r.L_wrong) << "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"froth: Kac froth free-energy toolkit"};
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides seed)");
  app.require_subcommand(1);
  app.fallthrough();
  struct Entry {
    const char* name;
    const char* help;
    void (*fn)(const Context&, std::ostream&);
  };
  const Entry entries[] = {
      {"instanton", "solve the front and record tau", cmd_instanton},
      {"eh-curve", "sample e(h) and locate h*", cmd_eh_curve},
      {"minimize", "multistart energy minimization", cmd_minimize},
      {"coarse-grain", "coarse grain a profile", cmd_coarse_grain},
      {"verify", "run the certificate suite", cmd_verify},
      {"report", "structure report of a profile", cmd_report},
  };
  for (const auto& e : entries) app.add_subcommand(e.name, e.help);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    json doc = default_config_json();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ParseError("cannot open config " + config_path);
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    if (*seed_opt) {
      if (!doc.is_object()) throw ConfigError("/", "expected an object");
      doc["seed"] = seed;
    }
    Context ctx{parse_config(doc), {}};
    ctx.out = out_dir.empty() ? std::filesystem::path(ctx.config.output_dir)
                              : std::filesystem::path(out_dir);
    std::filesystem::create_directories(ctx.out);
    for (const auto& e : entries)
      if (app.got_subcommand(e.name)) e.fn(ctx, out);
    return 0;
  } catch (const CertificateFailure& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace froth::cli
