#include <froth/energy.hpp>

#include <algorithm>
#include <cmath>

#include <froth/errors.hpp>
#include <froth/exp_kernel.hpp>

namespace froth {

nlohmann::json to_json(const EnergyBreakdown& e) {
  return {{"local", e.local},
          {"exchange", e.exchange},
          {"dipole", e.dipole},
          {"boundary", e.boundary},
          {"total", e.total}};
}

EnergyEvaluator::EnergyEvaluator(const ModelParams& params, double L, double dx, BoundaryKind bc,
                                 const CustomBoundary& custom, const EnergyOptions& opt)
    : params_(params), L_(L), dx_(dx), N_(static_cast<std::size_t>(std::llround(L / dx))),
      bc_(bc), custom_(custom) {
  w_ = params.kernel.stencil(dx);
  K_ = static_cast<long>(w_.size()) - 1;
  if (bc_ == BoundaryKind::custom) {
    if (static_cast<long>(custom_.left.size()) < K_ || static_cast<long>(custom_.right.size()) < K_)
      throw MissingBoundaryData("custom boundary must cover one J-range on each side");
    if (params.gamma > 0.0 && opt.custom_dipole_cutoff > 0.0) {
      const double need = opt.custom_dipole_cutoff / (params.gamma * params.measure.alpha_min());
      const double have =
          dx * static_cast<double>(std::min(custom_.left.size(), custom_.right.size()));
      if (have < need * (1.0 - 1e-12))
        throw MissingBoundaryData("custom boundary covers " + std::to_string(have) +
                                  ", the dipole cutoff needs " + std::to_string(need));
    }
  }
  if (params.gamma > 0.0) {
    for (const auto& at : params.measure.atoms()) {
      Atom a;
      a.c = params.measure.lambda() * at.weight;
      a.kappa = params.gamma * at.rate;
      a.edge = std::exp(-a.kappa * L);
      const double f = -std::expm1(-a.kappa * dx) / a.kappa;
      a.a.resize(N_);
      a.b.resize(N_);
      for (std::size_t p = 0; p < N_; ++p) {
        a.a[p] = std::exp(-a.kappa * dx * static_cast<double>(p)) * f;
        a.b[p] = std::exp(-a.kappa * dx * static_cast<double>(N_ - 1 - p)) * f;
      }
      if (bc_ == BoundaryKind::custom) {
        // int over exterior cells of phi_out(y) e^{-kappa dist(y, edge)}
        const std::size_t nl = custom_.left.size();
        for (std::size_t t = 0; t < nl; ++t)
          a.P_left += custom_.left[t] * std::exp(-a.kappa * dx * static_cast<double>(nl - 1 - t)) * f;
        for (std::size_t t = 0; t < custom_.right.size(); ++t)
          a.P_right += custom_.right[t] * std::exp(-a.kappa * dx * static_cast<double>(t)) * f;
      }
      atoms_.push_back(std::move(a));
    }
  }
}

EnergyEvaluator::EnergyEvaluator(const GridProfile& p, const ModelParams& params,
                                 const EnergyOptions& opt)
    : EnergyEvaluator(params, p.L(), p.dx(), p.bc(), p.custom(), opt) {}

EnergyBreakdown EnergyEvaluator::energy(const std::vector<double>& phi) const {
  return compute(phi, nullptr);
}

EnergyBreakdown EnergyEvaluator::energy_and_gradient(const std::vector<double>& phi,
                                                     std::vector<double>& grad) const {
  return compute(phi, &grad);
}

// Exterior value at cell j (j < 0 or j >= N). src receives the interior cell
// the value is copied from, or -1 when it is fixed data.
double EnergyEvaluator::out_value(long j, const std::vector<double>& phi, long* src) const {
  const long N = static_cast<long>(N_);
  *src = -1;
  switch (bc_) {
    case BoundaryKind::plus: return params_.m_beta;
    case BoundaryKind::minus: return -params_.m_beta;
    case BoundaryKind::custom: {
      if (j < 0) return custom_.left[static_cast<std::size_t>(static_cast<long>(custom_.left.size()) + j)];
      return custom_.right[static_cast<std::size_t>(j - N)];
    }
    case BoundaryKind::periodic: {
      const long r = ((j % N) + N) % N;
      *src = r;
      return phi[static_cast<std::size_t>(r)];
    }
    case BoundaryKind::neumann: {
      const long r = ((j % (2 * N)) + 2 * N) % (2 * N);
      *src = r < N ? r : 2 * N - 1 - r;
      return phi[static_cast<std::size_t>(*src)];
    }
    case BoundaryKind::open: break;
  }
  return 0.0;
}

EnergyBreakdown EnergyEvaluator::compute(const std::vector<double>& phi,
                                         std::vector<double>* grad) const {
  if (phi.size() != N_) throw ValueError("sample vector has the wrong length");
  const long N = static_cast<long>(N_);
  const double dx = dx_;
  EnergyBreakdown e;
  std::vector<double> dummy;
  std::vector<double>& g = grad ? *grad : dummy;
  if (grad) g.assign(N_, 0.0);

  for (std::size_t i = 0; i < N_; ++i) {
    e.local += eval_F(phi[i], params_);
    if (grad) g[i] = eval_F_prime(phi[i], params_);
  }
  e.local *= dx;

  double ex = 0.0;
  for (long i = 0; i < N; ++i) {
    const long kmax = std::min(K_, N - 1 - i);
    const double pi = phi[static_cast<std::size_t>(i)];
    for (long k = 1; k <= kmax; ++k) {
      const double d = pi - phi[static_cast<std::size_t>(i + k)];
      const double wd = w_[static_cast<std::size_t>(k)] * d;
      ex += wd * d;
      if (grad) {
        g[static_cast<std::size_t>(i)] += wd;
        g[static_cast<std::size_t>(i + k)] -= wd;
      }
    }
  }
  e.exchange = 0.5 * dx * ex;

  double bex = 0.0;
  if (bc_ != BoundaryKind::open) {
    auto pair = [&](long i, long j) {
      long src;
      const double v = out_value(j, phi, &src);
      const long dist = std::abs(i - j);
      if (dist > K_) return;
      const double d = phi[static_cast<std::size_t>(i)] - v;
      const double wd = w_[static_cast<std::size_t>(dist)] * d;
      bex += wd * d;
      if (grad) {
        g[static_cast<std::size_t>(i)] += wd;
        if (src >= 0) g[static_cast<std::size_t>(src)] -= wd;
      }
    };
    if (bc_ != BoundaryKind::periodic) {
      for (long i = 0; i < std::min(K_, N); ++i)
        for (long j = i - K_; j < 0; ++j) pair(i, j);
    }
    for (long i = std::max(0L, N - K_); i < N; ++i)
      for (long j = N; j <= i + K_; ++j) pair(i, j);
  }
  const double bexchange = 0.5 * dx * bex;

  double dip = 0.0, bdip = 0.0;
  std::vector<double> U;
  const double gam = params_.gamma;
  for (const auto& at : atoms_) {
    expk::potential_uniform(dx, phi, at.kappa, U);
    double s = 0.0;
    for (std::size_t p = 0; p < N_; ++p) s += phi[p] * U[p];
    dip += 0.5 * gam * at.c * s;
    if (grad)
      for (std::size_t p = 0; p < N_; ++p) g[p] += gam * at.c * U[p] / dx;
    if (bc_ == BoundaryKind::open) continue;
    double A = 0.0, B = 0.0;
    for (std::size_t p = 0; p < N_; ++p) {
      A += phi[p] * at.a[p];
      B += phi[p] * at.b[p];
    }
    const double pref = gam * at.c;
    switch (bc_) {
      case BoundaryKind::plus:
      case BoundaryKind::minus: {
        const double sm = (bc_ == BoundaryKind::plus ? 1.0 : -1.0) * params_.m_beta / at.kappa;
        bdip += pref * sm * (A + B);
        if (grad)
          for (std::size_t p = 0; p < N_; ++p) g[p] += pref * sm * (at.a[p] + at.b[p]) / dx;
        break;
      }
      case BoundaryKind::periodic: {
        const double den = -std::expm1(-at.kappa * L_);
        bdip += pref * A * B / den;
        if (grad)
          for (std::size_t p = 0; p < N_; ++p)
            g[p] += pref * (at.a[p] * B + A * at.b[p]) / (den * dx);
        break;
      }
      case BoundaryKind::neumann: {
        const double den = -std::expm1(-2.0 * at.kappa * L_);
        bdip += pref * (A * A + B * B + 2.0 * at.edge * A * B) / den;
        if (grad)
          for (std::size_t p = 0; p < N_; ++p)
            g[p] += pref *
                    (2.0 * A * at.a[p] + 2.0 * B * at.b[p] +
                     2.0 * at.edge * (at.a[p] * B + A * at.b[p])) /
                    (den * dx);
        break;
      }
      case BoundaryKind::custom: {
        bdip += pref * (A * at.P_left + B * at.P_right);
        if (grad)
          for (std::size_t p = 0; p < N_; ++p)
            g[p] += pref * (at.a[p] * at.P_left + at.b[p] * at.P_right) / dx;
        break;
      }
      case BoundaryKind::open: break;
    }
  }
  e.dipole = dip;
  e.boundary = bexchange + bdip;
  e.total = e.local + e.exchange + e.dipole + e.boundary;
  return e;
}

EnergyBreakdown total_energy(const GridProfile& p, const ModelParams& params,
                             const EnergyOptions& opt) {
  return EnergyEvaluator(p, params, opt).energy(p.samples());
}

std::vector<double> energy_gradient(const GridProfile& p, const ModelParams& params,
                                    const EnergyOptions& opt) {
  std::vector<double> g;
  EnergyEvaluator(p, params, opt).energy_and_gradient(p.samples(), g);
  return g;
}

double short_range_energy_cells(const std::vector<double>& phi, std::size_t i0, std::size_t i1,
                                double dx, const std::vector<double>& stencil,
                                const ModelParams& params) {
  const std::size_t K = stencil.size() - 1;
  double loc = 0.0, ex = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    loc += eval_F(phi[i], params);
    const std::size_t jmax = std::min(i1 - 1, i + K);
    for (std::size_t j = i + 1; j <= jmax; ++j) {
      const double d = phi[i] - phi[j];
      ex += stencil[j - i] * d * d;
    }
  }
  return dx * loc + 0.5 * dx * ex;
}

double short_range_energy(const GridProfile& p, const ModelParams& params, const Interval& I) {
  const std::size_t i0 = p.line_index(I.a);
  const std::size_t i1 = p.line_index(I.b);
  if (i1 < i0) throw AlignmentError("reversed interval");
  return short_range_energy_cells(p.samples(), i0, i1, p.dx(), params.kernel.stencil(p.dx()),
                                  params);
}

double dipole_energy(const GridProfile& p, const ModelParams& params) {
  if (params.gamma == 0.0) return 0.0;
  std::vector<double> U;
  double total = 0.0;
  for (const auto& at : params.measure.atoms()) {
    const double kappa = params.gamma * at.rate;
    expk::potential_uniform(p.dx(), p.samples(), kappa, U);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * U[i];
    total += 0.5 * params.gamma * params.measure.lambda() * at.weight * s;
  }
  return total;
}

double dipole_energy(const StepProfile& s, const ModelParams& params, bool periodic) {
  if (params.gamma == 0.0) return 0.0;
  std::vector<double> len(s.pieces());
  for (std::size_t i = 0; i < len.size(); ++i) len[i] = s.length(i);
  const auto& val = s.values();
  std::vector<double> U;
  double total = 0.0;
  for (const auto& at : params.measure.atoms()) {
    const double kappa = params.gamma * at.rate;
    const double c = params.measure.lambda() * at.weight;
    expk::potential(len, val, kappa, U);
    double q = 0.0;
    for (std::size_t i = 0; i < len.size(); ++i) q += val[i] * U[i];
    total += 0.5 * params.gamma * c * q;
    if (periodic) {
      const auto m = expk::edge_moments(len, kappa);
      double A = 0.0, B = 0.0;
      for (std::size_t i = 0; i < len.size(); ++i) {
        A += val[i] * m.a[i];
        B += val[i] * m.b[i];
      }
      total += params.gamma * c * A * B / -std::expm1(-kappa * s.L());
    }
  }
  return total;
}

int count_sign_changes(const StepProfile& s, bool periodic) {
  int first = 0, last = 0, changes = 0;
  for (double v : s.values()) {
    if (v == 0.0) continue;
    const int sg = v > 0.0 ? 1 : -1;
    if (first == 0) first = sg;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  if (periodic && first != 0 && first != last) ++changes;
  return changes;
}

double tilde_energy(const StepProfile& s, const ModelParams& params, bool periodic) {
  if (!params.has_tau()) throw ParameterError("tilde energy needs the surface tension tau");
  double loc = 0.0;
  for (std::size_t i = 0; i < s.pieces(); ++i) loc += eval_tilde_F(s.values()[i], params) * s.length(i);
  return loc + params.tau * count_sign_changes(s, periodic) + dipole_energy(s, params, periodic);
}

}  // namespace froth
