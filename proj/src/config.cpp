#include <froth/config.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <froth/errors.hpp>
#include <froth/io.hpp>

namespace froth {

namespace {

using nlohmann::json;

// Reads members of one JSON object and rejects whatever was not asked for.
class Section {
 public:
  Section(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) throw ConfigError(ptr_.empty() ? "/" : ptr_, "expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string at(const std::string& k) const { return ptr_ + "/" + k; }

  const json* get(const std::string& k, bool required) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      if (required) throw ConfigError(at(k), "required key missing");
      return nullptr;
    }
    return &j_.at(k);
  }

  void number(const std::string& k, double& out, bool required = false) {
    if (const json* v = get(k, required)) {
      if (!v->is_number()) throw ConfigError(at(k), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(at(k), "must be finite");
    }
  }

  template <class Int>
  void integer(const std::string& k, Int& out, bool required = false) {
    if (const json* v = get(k, required)) {
      if (!v->is_number_integer()) throw ConfigError(at(k), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) out = v->get<Int>();
        else if (v->get<long long>() >= 0) out = static_cast<Int>(v->get<long long>());
        else throw ConfigError(at(k), "must be nonnegative");
      } else {
        out = v->get<Int>();
      }
    }
  }

  void boolean(const std::string& k, bool& out) {
    if (const json* v = get(k, false)) {
      if (!v->is_boolean()) throw ConfigError(at(k), "expected a boolean");
      out = v->get<bool>();
    }
  }

  void string(const std::string& k, std::string& out) {
    if (const json* v = get(k, false)) {
      if (!v->is_string()) throw ConfigError(at(k), "expected a string");
      out = v->get<std::string>();
    }
  }

  std::optional<Section> child(const std::string& k, bool required = false) {
    if (const json* v = get(k, required)) return Section(*v, at(k));
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& ptr, const std::string& what) {
  if (!ok) throw ConfigError(ptr, what);
}

// Runs a validate() and rethrows its message against the section pointer.
template <class F>
void validated(const std::string& ptr, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(ptr, e.what());
  }
}

void parse_model(Section s, ModelConfig& m) {
  s.number("beta", m.beta, true);
  s.number("J0_hat", m.J0_hat, true);
  s.number("lambda", m.lambda, true);
  const json* meas = s.get("measure", true);
  const std::string mp = s.at("measure");
  if (!meas->is_array() || meas->empty()) throw ConfigError(mp, "expected a nonempty array");
  m.measure.clear();
  for (std::size_t i = 0; i < meas->size(); ++i) {
    Section a((*meas)[i], mp + "/" + std::to_string(i));
    KacAtom atom{0.0, 0.0};
    a.number("weight", atom.weight, true);
    a.number("alpha", atom.rate, true);
    a.finish();
    require(atom.weight > 0.0, a.at("weight"), "must be positive");
    require(atom.rate > 0.0, a.at("alpha"), "must be positive");
    m.measure.push_back(atom);
  }
  s.number("gamma", m.gamma, true);
  if (s.has("tau")) {
    double t = 0.0;
    s.number("tau", t);
    require(t > 0.0, s.at("tau"), "surface tension must be positive");
    m.tau = t;
  }
  s.finish();
  require(m.beta > 0.0, s.at("beta"), "must be positive");
  require(m.J0_hat > 0.0, s.at("J0_hat"), "must be positive");
  require(m.beta * m.J0_hat > 1.0, s.at("beta"), "beta * J0_hat must exceed 1");
  require(m.lambda > 0.0, s.at("lambda"), "must be positive");
  require(m.gamma > 0.0 && m.gamma < 0.2, s.at("gamma"), "must lie in (0, 0.2)");
}

void parse_instanton(Section s, InstantonOptions& o) {
  s.number("W", o.W);
  s.number("dx", o.dx);
  s.number("tol", o.tol);
  s.integer("max_sweeps", o.max_sweeps);
  s.number("damping", o.damping);
  std::string init = o.init == InstantonOptions::Init::tanh ? "tanh" : "sign";
  s.string("init", init);
  s.finish();
  require(o.W >= 20.0, s.at("W"), "window half-width must be at least 20");
  require(o.dx > 0.0 && std::abs(1.0 / o.dx - std::round(1.0 / o.dx)) < 1e-9, s.at("dx"),
          "must divide 1");
  require(o.tol > 0.0, s.at("tol"), "must be positive");
  require(o.max_sweeps > 0, s.at("max_sweeps"), "must be positive");
  require(o.damping >= 0.0 && o.damping < 1.0, s.at("damping"), "must lie in [0, 1)");
  if (init == "tanh") o.init = InstantonOptions::Init::tanh;
  else if (init == "sign") o.init = InstantonOptions::Init::sign;
  else throw ConfigError(s.at("init"), "expected \"tanh\" or \"sign\"");
}

void parse_eh(Section s, EhConfig& e) {
  s.integer("samples", e.samples);
  s.number("h_lo", e.h_lo);
  s.number("h_hi", e.h_hi);
  s.integer("bound_samples", e.bound_samples);
  s.finish();
  require(e.samples >= 2, s.at("samples"), "need at least 2 samples");
  require(e.bound_samples >= 10, s.at("bound_samples"), "need at least 10 samples");
  require(e.h_lo >= 0.0, s.at("h_lo"), "must be nonnegative");
  require(e.h_hi == 0.0 || e.h_hi > e.h_lo, s.at("h_hi"), "must exceed h_lo");
}

void parse_minimize(Section s, MinimizeRunConfig& m) {
  s.number("L", m.L);
  s.number("periods", m.periods);
  s.number("dx", m.dx);
  std::string bc = to_string(m.bc);
  s.string("bc", bc);
  s.integer("starts", m.starts);
  auto& o = m.options;
  s.integer("max_iters", o.max_iters);
  s.number("grad_tol", o.grad_tol);
  s.number("step0", o.step0);
  s.number("backtrack", o.backtrack);
  s.number("armijo", o.armijo);
  s.number("grow", o.grow);
  s.number("max_step", o.max_step);
  s.integer("trace_every", o.trace_every);
  s.integer("merge_moves", o.merge_moves);
  s.integer("merge_iters", o.merge_iters);
  s.finish();
  require(m.L >= 0.0, s.at("L"), "must be nonnegative");
  require(m.periods > 0.0, s.at("periods"), "must be positive");
  require(m.dx > 0.0 && std::abs(1.0 / m.dx - std::round(1.0 / m.dx)) < 1e-9, s.at("dx"),
          "must divide 1");
  require(m.starts >= 1, s.at("starts"), "must be at least 1");
  validated(s.at("bc"), [&] { m.bc = boundary_from_string(bc); });
  require(m.bc != BoundaryKind::custom, s.at("bc"), "custom exterior data is not configurable");
  validated("/minimize", [&] { o.validate(); });
}

void parse_coarsegrain(Section s, CoarseGrainRunConfig& c) {
  s.number("delta", c.cg.delta);
  s.number("rho", c.cg.rho);
  s.number("ell_minus", c.cg.ell_minus);
  s.number("c0", c.cg.c0);
  s.number("kappa", c.cg.kappa);
  s.number("energy_cutoff_multiplier", c.cg.energy_cutoff_multiplier);
  s.number("C_bar", c.cg.C_bar);
  s.boolean("strict", c.cg.strict);
  s.number("C_cert", c.C_cert);
  s.string("input", c.input);
  s.finish();
  require(c.C_cert > 0.0, s.at("C_cert"), "must be positive");
  validated("/coarsegrain", [&] { c.cg.validate(); });
}

void parse_diagnostics(Section s, DiagnosticsConfig& d) {
  s.number("delta0", d.delta0);
  s.number("delta1", d.delta1);
  s.number("eps0", d.eps0);
  s.number("eps", d.eps);
  s.number("eps_prime", d.eps_prime);
  s.number("slack", d.slack);
  s.integer("histogram_bins", d.histogram_bins);
  s.finish();
  validated("/diagnostics", [&] { d.validate(); });
}

void parse_verify(Section s, VerifyConfig& v) {
  s.string("input", v.input);
  s.number("trial_periods", v.trial_periods);
  s.number("dx", v.dx);
  s.number("gradient_tol", v.gradient_tol);
  s.finish();
  require(v.trial_periods >= 1.0 && std::abs(v.trial_periods - std::round(v.trial_periods)) < 1e-12,
          s.at("trial_periods"), "must be a positive integer");
  require(v.dx > 0.0 && std::abs(1.0 / v.dx - std::round(1.0 / v.dx)) < 1e-9, s.at("dx"),
          "must divide 1");
  require(v.gradient_tol > 0.0, s.at("gradient_tol"), "must be positive");
}

}  // namespace

ModelParams RunConfig::params() const {
  ModelParams p = make_params(model.beta, ShortRangeKernel::quartic(model.J0_hat),
                              KacMeasure(model.measure, model.lambda), model.gamma);
  if (model.tau) p = p.with_tau(*model.tau);
  return p;
}

std::string RunConfig::hash() const { return config_hash(source); }

RunConfig parse_config(const nlohmann::json& doc) {
  RunConfig c;
  c.source = doc;
  Section root(doc, "");
  parse_model(*root.child("model", true), c.model);
  if (auto s = root.child("instanton")) parse_instanton(*s, c.instanton);
  if (auto s = root.child("eh")) parse_eh(*s, c.eh);
  if (auto s = root.child("minimize")) parse_minimize(*s, c.minimize);
  if (auto s = root.child("coarsegrain")) parse_coarsegrain(*s, c.coarsegrain);
  if (auto s = root.child("diagnostics")) parse_diagnostics(*s, c.diagnostics);
  if (auto s = root.child("verify")) parse_verify(*s, c.verify);
  root.string("output_dir", c.output_dir);
  root.integer("seed", c.seed);
  root.finish();
  c.minimize.options.seed = c.seed;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

nlohmann::json default_config_json() {
  return {{"model",
           {{"beta", 2.0},
            {"J0_hat", 1.0},
            {"lambda", 1.0},
            {"measure", nlohmann::json::array({{{"weight", 1.0}, {"alpha", 1.0}}})},
            {"gamma", 1e-2}}},
          {"seed", 0}};
}

}  // namespace froth
