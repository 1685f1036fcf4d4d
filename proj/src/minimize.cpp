#include <froth/minimize.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>

#include <froth/errors.hpp>
#include <froth/io.hpp>

namespace froth {

void MinimizeOptions::validate() const {
  if (!(grad_tol > 0.0)) throw ParameterError("grad_tol must be positive");
  if (!(step0 > 0.0)) throw ParameterError("step0 must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ParameterError("backtrack must lie in (0,1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ParameterError("armijo constant must lie in (0,1)");
  if (!(grow >= 1.0)) throw ParameterError("step growth must be at least 1");
  if (max_iters < 0) throw ParameterError("max_iters must be nonnegative");
  if (restarts < 1) throw ParameterError("restarts must be at least 1");
  if (merge_moves < 0) throw ParameterError("merge_moves must be nonnegative");
  if (merge_iters < 1) throw ParameterError("merge_iters must be positive");
}

std::string to_string(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::converged: return "converged";
    case MinimizeStatus::max_iters: return "max_iters";
    case MinimizeStatus::stalled: return "stalled";
  }
  return "?";
}

std::vector<double> project_mean_box(const std::vector<double>& y, double m) {
  if (std::abs(m) > 1.0) throw DomainError("mean constraint outside [-1,1]");
  const std::size_t n = y.size();
  auto mean_at = [&](double mu) {
    double s = 0.0;
    for (double v : y) s += std::clamp(v - mu, -1.0, 1.0);
    return s / static_cast<double>(n);
  };
  double lo = *std::min_element(y.begin(), y.end()) - 1.0;
  double hi = *std::max_element(y.begin(), y.end()) + 1.0;
  // mean_at is nonincreasing in mu
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_at(mid) > m ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(y[i] - mu, -1.0, 1.0);
  // absorb the bisection residual in the free coordinates
  double s = 0.0;
  std::size_t nfree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i];
    if (std::abs(x[i]) < 1.0) ++nfree;
  }
  const double r = m - s / static_cast<double>(n);
  if (nfree > 0 && r != 0.0) {
    const double c = r * static_cast<double>(n) / static_cast<double>(nfree);
    for (auto& v : x)
      if (std::abs(v) < 1.0) v = std::clamp(v + c, -1.0, 1.0);
  }
  return x;
}

namespace {

using Projector = std::function<std::vector<double>(const std::vector<double>&)>;

MinimizeResult descend(const GridProfile& init, const ModelParams& params,
                       const MinimizeOptions& opt, const Projector& proj) {
  opt.validate();
  const EnergyEvaluator ev(init, params);
  const double dx = init.dx();
  std::vector<double> x = proj(init.samples()), g, y(x.size()), gy;
  EnergyBreakdown E = ev.energy_and_gradient(x, g);
  MinimizeResult res{init.with_samples(x), E, 0.0, 0, MinimizeStatus::max_iters, 0, {}};

  auto pg_norm = [&](const std::vector<double>& xv, const std::vector<double>& gv) {
    std::vector<double> t(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) t[i] = xv[i] - gv[i];
    t = proj(t);
    double s = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) s = std::max(s, std::abs(xv[i] - t[i]));
    return s;
  };

  double step = opt.step0;
  double pg = pg_norm(x, g);
  long it = 0;
  if (opt.trace_every > 0) res.trace.push_back({0, E.total, pg, 0.0});
  res.status = MinimizeStatus::max_iters;
  while (true) {
    if (pg <= opt.grad_tol) {
      res.status = MinimizeStatus::converged;
      break;
    }
    if (it >= opt.max_iters) break;
    bool accepted = false;
    EnergyBreakdown Ey;
    while (step >= 1e-14) {
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - step * g[i];
      y = proj(y);
      double dec = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dec += g[i] * (x[i] - y[i]);
      dec *= dx;
      Ey = ev.energy_and_gradient(y, gy);
      if (Ey.total <= E.total - opt.armijo * dec) {
        accepted = true;
        break;
      }
      step *= opt.backtrack;
    }
    if (!accepted) {
      if (pg <= 1e3 * opt.grad_tol) {
        res.status = MinimizeStatus::stalled;
        break;
      }
      res.profile = init.with_samples(x);
      res.energy = E;
      res.grad_norm = pg;
      res.iters = it;
      throw LineSearchFailure("line search underflow at iteration " + std::to_string(it) +
                              ", projected gradient " + std::to_string(pg) +
                              ", energy " + format17(E.total));
    }
    if (Ey.total > E.total) throw InvariantError("energy increased along an accepted step");
    ++it;
    x.swap(y);
    g.swap(gy);
    E = Ey;
    pg = pg_norm(x, g);
    if (opt.trace_every > 0 && it % opt.trace_every == 0) res.trace.push_back({it, E.total, pg, step});
    step = std::min(step * opt.grow, opt.max_step);
  }
  res.profile = init.with_samples(x);
  res.energy = E;
  res.grad_norm = pg;
  res.iters = it;
  return res;
}

Projector box_projector() {
  return [](const std::vector<double>& y) {
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::clamp(y[i], -1.0, 1.0);
    return x;
  };
}

// Shortest maximal run of constant sign, as a cyclic run when periodic.
bool shortest_domain(const std::vector<double>& x, bool periodic, std::size_t& start,
                     std::size_t& len) {
  const std::size_t n = x.size();
  auto sg = [&](std::size_t i) { return x[i % n] >= 0.0 ? 1 : -1; };
  std::size_t off = 0;
  if (periodic) {
    while (off < n && sg(off) == sg((off + n - 1) % n)) ++off;
    if (off == n) return false;
  }
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sg(off + j) == sg(off + i)) ++j;
    runs.emplace_back(off + i, j - i);
    i = j;
  }
  if (runs.size() < 2) return false;
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].second < runs[best].second) best = k;
  start = runs[best].first;
  len = runs[best].second;
  return true;
}

MinimizeResult with_merges(const GridProfile& init, const ModelParams& params,
                           const MinimizeOptions& opt, const Projector& proj) {
  if (opt.merge_moves == 0) return descend(init, params, opt, proj);
  MinimizeOptions quick = opt;
  quick.max_iters = std::min(opt.max_iters, opt.merge_iters);
  MinimizeResult best = descend(init, params, quick, proj);
  long done = best.iters;
  auto append = [&](MinimizeResult& r, const MinimizeResult& before) {
    for (auto& row : r.trace) row.iter += done;
    done += r.iters;
    r.trace.insert(r.trace.begin(), before.trace.begin(), before.trace.end());
  };
  const bool periodic = init.bc() == BoundaryKind::periodic;
  for (int attempt = 0; attempt < opt.merge_moves; ++attempt) {
    std::vector<double> x = best.profile.samples();
    std::size_t s, len;
    if (!shortest_domain(x, periodic, s, len)) break;
    for (std::size_t k = 0; k < len; ++k) {
      double& v = x[(s + k) % x.size()];
      v = -v;
    }
    MinimizeResult trial = descend(init.with_samples(x), params, quick, proj);
    if (!(trial.energy.total < best.energy.total)) break;
    trial.merges_accepted = best.merges_accepted + 1;
    append(trial, best);
    best = std::move(trial);
  }
  MinimizeResult out = descend(best.profile, params, opt, proj);
  out.merges_accepted = best.merges_accepted;
  append(out, best);
  out.iters = done;
  return out;
}

}  // namespace

MinimizeResult minimize_energy(const GridProfile& init, const ModelParams& params,
                               const MinimizeOptions& opt) {
  return with_merges(init, params, opt, box_projector());
}

MinimizeResult minimize_with_mean_constraint(const GridProfile& init, double m,
                                             const ModelParams& params,
                                             const MinimizeOptions& opt) {
  if (std::abs(m) > 1.0) throw DomainError("mean constraint outside [-1,1]");
  return descend(init, params, opt,
                 [m](const std::vector<double>& y) { return project_mean_box(y, m); });
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> random_samples(std::uint64_t seed, std::uint64_t index, std::size_t n) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t r = splitmix64(key + static_cast<std::uint64_t>(i));
    v[i] = 2.0 * (static_cast<double>(r >> 11) * 0x1.0p-53) - 1.0;
  }
  return v;
}

MultistartResult multistart(const ModelParams& params, double L, double dx, BoundaryKind bc,
                            int n_starts, const MinimizeOptions& opt) {
  if (n_starts < 1) throw ParameterError("n_starts must be at least 1");
  const auto n = static_cast<std::size_t>(std::llround(L / dx));
  std::vector<std::future<MinimizeResult>> jobs;
  for (int k = 0; k < n_starts; ++k)
    jobs.push_back(std::async(std::launch::async, [&, k] {
      const GridProfile init(L, dx, random_samples(opt.seed, static_cast<std::uint64_t>(k), n), bc);
      return minimize_energy(init, params, opt);
    }));
  std::vector<MinimizeResult> all;
  for (auto& j : jobs) all.push_back(j.get());
  std::vector<double> energies;
  std::vector<MinimizeStatus> statuses;
  std::size_t best = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    energies.push_back(all[k].energy.total);
    statuses.push_back(all[k].status);
    if (all[k].energy.total < all[best].energy.total) best = k;
  }
  MultistartResult out{std::move(all[best]), best, std::move(energies), std::move(statuses)};
  return out;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     const std::string& config_hash) {
  CsvWriter w({"iter", "energy", "grad_norm", "step"}, config_hash);
  for (const auto& r : trace) w.row({static_cast<double>(r.iter), r.energy, r.grad_norm, r.step});
  w.save(path);
}

}  // namespace froth
