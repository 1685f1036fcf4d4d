#include <froth/coarsegrain.hpp>

#include <algorithm>
#include <cmath>
#include <utility>

#include <froth/energy.hpp>
#include <froth/errors.hpp>

namespace froth {

void CoarseGrainConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0 / 3.0)) throw ParameterError("delta must lie in (0, 1/3)");
  if (!(rho > 0.0 && rho < delta / 4.0)) throw ParameterError("rho must lie in (0, delta/4)");
  const double n = -std::log2(ell_minus);
  if (!(ell_minus > 0.0 && ell_minus < 1.0) || std::abs(n - std::round(n)) > 1e-12)
    throw ParameterError("ell_minus must be 2^-n with n >= 1");
  if (!(c0 > 0.0)) throw ParameterError("c0 must be positive");
  if (!(kappa > 0.0)) throw ParameterError("kappa must be positive");
  if (!(energy_cutoff_multiplier > 0.0)) throw ParameterError("energy cutoff multiplier must be positive");
  if (!(C_bar >= 0.0)) throw ParameterError("C_bar must be nonnegative");
}

double cg_zeta(double gamma, const CoarseGrainConfig& cfg) {
  const double lg = std::log(gamma);
  return cfg.c0 * std::pow(gamma, cfg.delta) * lg * lg;
}

double cg_m_bar(double m_beta, double gamma, const CoarseGrainConfig& cfg) {
  return m_beta - cfg.kappa * std::pow(gamma, cfg.delta / 2.0);
}

std::string to_string(SegmentKind k) {
  return k == SegmentKind::single_good_block ? "single_good_block" : "bad_run";
}

namespace {

struct Prefix {
  std::vector<double> s;
  explicit Prefix(const GridProfile& p) : s(p.size() + 1, 0.0) {
    for (std::size_t i = 0; i < p.size(); ++i) s[i + 1] = s[i] + p[i];
  }
  double mean(std::size_t i0, std::size_t i1) const {
    return (s[i1] - s[i0]) / static_cast<double>(i1 - i0);
  }
};

std::optional<FlatSegment> flat_search(const GridProfile& p, const Prefix& pre,
                                       const Interval& block, const ModelParams& params,
                                       const CoarseGrainConfig& cfg, double ml, double mr) {
  const double lm = cfg.ell_minus;
  const double lo = block.a + ml, hi = block.b - mr;
  const long j0 = static_cast<long>(std::ceil(lo / lm - 1e-9));
  const long j1 = static_cast<long>(std::floor(hi / lm + 1e-9));
  if (j1 <= j0) return std::nullopt;
  const double tol = std::pow(params.gamma, cfg.rho);
  const double m = params.m_beta;
  std::vector<double> avg;
  for (long j = j0; j < j1; ++j) {
    const std::size_t i0 = p.line_index(static_cast<double>(j) * lm);
    const std::size_t i1 = p.line_index(static_cast<double>(j + 1) * lm);
    avg.push_back(pre.mean(i0, i1));
  }
  FlatSegment best;
  for (std::size_t k = 0; k < avg.size();) {
    int om = 0;
    if (std::abs(avg[k] - m) <= tol) om = 1;
    else if (std::abs(avg[k] + m) <= tol) om = -1;
    if (om == 0) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < avg.size() && std::abs(avg[e] - om * m) <= tol) ++e;
    const int n = static_cast<int>(e - k);
    if (n > best.blocks) {
      best.blocks = n;
      best.omega = om;
      best.a = static_cast<double>(j0 + static_cast<long>(k)) * lm;
      best.b = static_cast<double>(j0 + static_cast<long>(e)) * lm;
    }
    k = e;
  }
  const double min_len =
      std::max(lm, cfg.C_bar * std::pow(params.gamma, -(cfg.delta - 2.0 * cfg.rho)));
  if (best.blocks == 0 || best.b - best.a < min_len * (1.0 - 1e-12)) return std::nullopt;
  return best;
}

// Step piece on [0, sum len] from (length, value) pairs; empty pieces dropped.
StepProfile make_piece(const std::vector<std::pair<double, double>>& parts) {
  std::vector<double> br{0.0}, val;
  double x = 0.0;
  for (const auto& [len, v] : parts) {
    if (!(len > 0.0)) continue;
    x += len;
    br.push_back(x);
    val.push_back(v);
  }
  return {br, val};
}

StepProfile mirror(const StepProfile& s) {
  std::vector<std::pair<double, double>> parts;
  for (std::size_t i = s.pieces(); i-- > 0;) parts.emplace_back(s.length(i), s.values()[i]);
  return make_piece(parts);
}

double log2_margin(double x) {
  const double l = std::log(x);
  return 0.5 * l * l;
}

}  // namespace

std::optional<FlatSegment> find_flat_segment(const GridProfile& p, const Interval& block,
                                             const ModelParams& params,
                                             const CoarseGrainConfig& cfg, double margin_left,
                                             double margin_right) {
  return flat_search(p, Prefix(p), block, params, cfg, margin_left, margin_right);
}

std::vector<BlockLabel> classify_blocks(const GridProfile& p, const BlockPartition& part,
                                        const ModelParams& params, double cutoff_multiplier) {
  if (!params.has_tau()) throw ParameterError("block classification needs tau");
  const auto w = params.kernel.stencil(p.dx());
  const Prefix pre(p);
  std::vector<BlockLabel> labels(part.size());
  for (std::size_t b = 0; b < part.size(); ++b) {
    const std::size_t i0 = p.line_index(part.lines[b]), i1 = p.line_index(part.lines[b + 1]);
    labels[b].internal_energy = short_range_energy_cells(p.samples(), i0, i1, p.dx(), w, params);
    labels[b].low_energy = labels[b].internal_energy <= cutoff_multiplier * params.tau;
    labels[b].type = block_type(pre.mean(i0, i1), params.m_beta);
  }
  return labels;
}

AdaptedPartition adapted_partition(const GridProfile& p, const ModelParams& params,
                                   const CoarseGrainConfig& cfg) {
  cfg.validate();
  if (std::abs(cfg.ell_minus / p.dx() - std::round(cfg.ell_minus / p.dx())) > 1e-9)
    throw AlignmentError("grid spacing must divide ell_minus");
  AdaptedPartition ap;
  const double g = params.gamma;
  ap.regular = snap_to_grid(regular_partition(p.L(), cfg.delta, g), p.dx());
  ap.regular.labels = classify_blocks(p, ap.regular, params, cfg.energy_cutoff_multiplier);
  ap.ell_plus = ap.regular.alpha_L * std::pow(g, -cfg.delta);
  const std::size_t n = ap.regular.size();
  const Prefix pre(p);

  ap.flats.assign(n, std::nullopt);
  std::vector<std::size_t> low;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ap.regular.labels[i].low_energy) continue;
    const double ml = ap.ell_plus * (i == 0 ? 0.5 : 0.25);
    const double mr = ap.ell_plus * (i + 1 == n ? 0.5 : 0.25);
    ap.flats[i] = flat_search(p, pre, ap.regular.block(i), params, cfg, ml, mr);
    if (ap.flats[i]) low.push_back(i);
    else ++ap.demoted;
  }

  const auto& R = ap.regular.lines;
  auto snap = [&](double x) { return std::round(x / p.dx()) * p.dx(); };
  std::vector<double> lines{0.0};
  std::vector<AdaptedBlock> info;
  auto push_block = [&](double b, bool good, bool boundary, int wl, int wr) {
    AdaptedBlock blk;
    blk.I = {lines.back(), b};
    blk.good = good;
    blk.boundary = boundary;
    blk.omega_left = wl;
    blk.omega_right = wr;
    info.push_back(blk);
    lines.push_back(b);
  };
  // segment between cut points; prev/next are low block indices or -1 for the domain end
  auto emit_segment = [&](long prev, long next) {
    const std::size_t first = info.size();
    const long h0 = prev + 1, h1 = next < 0 ? static_cast<long>(n) : next;  // high blocks [h0, h1)
    const double end = next < 0 ? p.L() : snap(ap.flats[static_cast<std::size_t>(next)]->mid());
    const int wl = prev < 0 ? 0 : ap.flats[static_cast<std::size_t>(prev)]->omega;
    const int wr = next < 0 ? 0 : ap.flats[static_cast<std::size_t>(next)]->omega;
    Segment seg;
    seg.I.a = lines.back();
    if (h1 == h0) {
      push_block(end, true, prev < 0 || next < 0, wl, wr);
      seg.kind = SegmentKind::single_good_block;
    } else {
      for (long i = h0; i < h1; ++i)
        push_block(i + 1 == h1 ? end : R[static_cast<std::size_t>(i + 1)], false, false, 0, 0);
      seg.kind = SegmentKind::bad_run;
    }
    seg.I.b = end;
    seg.first = first;
    seg.last = info.size();
    ap.segments.push_back(seg);
  };
  long prev = -1;
  for (std::size_t j : low) {
    emit_segment(prev, static_cast<long>(j));
    prev = static_cast<long>(j);
  }
  emit_segment(prev, -1);
  // a domain-end single block behaves as a boundary good block only when it has a flat side
  for (auto& b : info)
    if (b.good && b.omega_left == 0 && b.omega_right == 0) b.good = false;

  const auto w = params.kernel.stencil(p.dx());
  for (auto& b : info) {
    const std::size_t i0 = p.line_index(b.I.a), i1 = p.line_index(b.I.b);
    if (i1 <= i0) throw AlignmentError("adapted block collapsed on the grid");
    b.mean = std::clamp(pre.mean(i0, i1), -1.0, 1.0);
    b.internal_energy = short_range_energy_cells(p.samples(), i0, i1, p.dx(), w, params);
  }
  ap.blocks.lines = lines;
  ap.blocks.kind = PartitionKind::adapted;
  ap.blocks.alpha_L = ap.regular.alpha_L;
  ap.blocks.labels.resize(info.size());
  for (std::size_t i = 0; i < info.size(); ++i) {
    ap.blocks.labels[i].low_energy = info[i].good;
    ap.blocks.labels[i].type = block_type(info[i].mean, params.m_beta);
    ap.blocks.labels[i].internal_energy = info[i].internal_energy;
  }
  ap.info = std::move(info);
  return ap;
}

Replacement replace_block(double ell, double m_i, const ReplacementContext& ctx,
                          const ModelParams& params, const CoarseGrainConfig& cfg) {
  if (!(ell > 0.0)) throw DomainError("block length must be positive");
  const double m = params.m_beta;
  const double zeta = cg_zeta(params.gamma, cfg);
  m_i = std::clamp(m_i, -1.0, 1.0);
  Replacement r;
  auto constant = [&](const std::string& name) {
    r.piece = make_piece({{ell, m_i}});
    r.case_name = name;
  };
  auto margin = [&](double raw) {
    if (raw > 0.25 * ell) {
      r.margin_capped = true;
      return 0.25 * ell;
    }
    return raw;
  };
  auto degenerate = [&](const std::string& name, double plateau) {
    if (cfg.strict)
      throw InvariantError("replacement plateau " + std::to_string(plateau) + " exceeds 1 in case " + name);
    r.degenerate = true;
    constant(name + "_fallback");
  };

  if (ctx.kind == ReplacementContext::Kind::bad) {
    if (std::abs(m_i) >= m - zeta) {
      constant("1_constant");
    } else {
      const double xi = ell * (m + m_i) / (2.0 * m);
      r.piece = make_piece({{xi, m}, {ell - xi, -m}});
      r.case_name = "1_jump";
    }
    return r;
  }

  if (!params.has_tau()) throw ParameterError("good-block replacement needs tau");
  const double Cstar = std::sqrt(5.0 * params.tau / eval_F_second(m, params));

  if (ctx.kind == ReplacementContext::Kind::good && ctx.omega_right == -ctx.omega_left) {
    const int w = ctx.omega_left;
    if (std::abs(m_i) <= m - zeta) {
      const double xi = ell * (m + w * m_i) / (2.0 * m);
      r.piece = make_piece({{xi, w * m}, {ell - xi, -w * m}});
      r.case_name = "2a_jump";
      return r;
    }
    const double q = margin(log2_margin(ell));
    const double plateau = m_i * ell / (ell - 2.0 * q);
    if (std::abs(plateau) > 1.0) {
      degenerate("2a_plateau", plateau);
      return r;
    }
    r.piece = make_piece({{q, w * m}, {ell - 2.0 * q, plateau}, {q, -w * m}});
    r.case_name = "2a_plateau";
    return r;
  }

  const double theta = 1.1 * Cstar / std::sqrt(ell);
  if (ctx.kind == ReplacementContext::Kind::good) {
    // reduce to (-,-)
    const double s = ctx.omega_left > 0 ? -1.0 : 1.0;
    const double mp = s * m_i;
    if (mp <= -m + theta) {
      constant("2b_constant");
      return r;
    }
    if (mp < m - theta) {
      const double xi = ell * (m - mp) / (4.0 * m);
      r.piece = make_piece({{xi, -s * m}, {ell - 2.0 * xi, s * m}, {xi, -s * m}});
      r.case_name = "2b_two_jumps";
      return r;
    }
    const double q = margin(log2_margin(ell));
    const double plateau = (mp * ell + 2.0 * m * q) / (ell - 2.0 * q);
    if (plateau > 1.0) {
      degenerate("2b_plateau", plateau);
      return r;
    }
    r.piece = make_piece({{q, -s * m}, {ell - 2.0 * q, s * plateau}, {q, -s * m}});
    r.case_name = "2b_plateau";
    return r;
  }

  // boundary good block, reduced to: domain on the left, interior sign -
  const int w = ctx.domain_on_left ? ctx.omega_right : ctx.omega_left;
  const double s = w > 0 ? -1.0 : 1.0;
  const double mp = s * m_i;
  StepProfile piece = make_piece({{ell, m_i}});
  if (mp <= -m + theta) {
    r.case_name = "2c_constant";
  } else if (mp < m - theta) {
    const double xi = ell * (m - mp) / (2.0 * m);
    piece = make_piece({{ell - xi, s * m}, {xi, -s * m}});
    r.case_name = "2c_jump";
  } else {
    const double q = margin(log2_margin(2.0 * ell));
    const double plateau = (mp * ell + m * q) / (ell - q);
    if (plateau > 1.0) {
      degenerate("2c_plateau", plateau);
      return r;
    }
    piece = make_piece({{ell - q, s * plateau}, {q, -s * m}});
    r.case_name = "2c_plateau";
  }
  r.piece = ctx.domain_on_left ? piece : mirror(piece);
  return r;
}

CoarseGrainResult coarse_grain(const GridProfile& p, const ModelParams& params,
                               const CoarseGrainConfig& cfg) {
  CoarseGrainResult res;
  res.partition = adapted_partition(p, params, cfg);
  std::vector<double> br{0.0}, val;
  for (const auto& b : res.partition.info) {
    ReplacementContext ctx;
    if (b.good) {
      ctx.kind = b.boundary ? ReplacementContext::Kind::boundary_good : ReplacementContext::Kind::good;
      ctx.omega_left = b.omega_left;
      ctx.omega_right = b.omega_right;
      ctx.domain_on_left = b.omega_left == 0;
    }
    const double ell = b.I.length();
    Replacement r = replace_block(ell, b.mean, ctx, params, cfg);
    double mass = 0.0;
    for (std::size_t i = 0; i < r.piece.pieces(); ++i) {
      mass += r.piece.values()[i] * r.piece.length(i);
      const double end = i + 1 == r.piece.pieces() ? b.I.b : b.I.a + r.piece.breakpoints()[i + 1];
      if (!(end > br.back())) continue;
      br.push_back(end);
      val.push_back(r.piece.values()[i]);
    }
    res.max_mass_error = std::max(res.max_mass_error, std::abs(mass / ell - b.mean));
    BlockTrace t;
    t.I = b.I;
    t.label = b.good ? (b.boundary ? "boundary_good" : "good") : "bad";
    t.case_name = r.case_name;
    t.mean = b.mean;
    t.piece = r.piece;
    t.margin_capped = r.margin_capped;
    t.degenerate = r.degenerate;
    res.trace.push_back(std::move(t));
  }
  res.sigma = StepProfile(br, val);
  res.m_bar = cg_m_bar(params.m_beta, params.gamma, cfg);
  res.in_K = res.sigma.in_K(res.m_bar);
  return res;
}

nlohmann::json trace_json(const CoarseGrainResult& r) {
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    const auto& t = r.trace[k];
    const auto& info = r.partition.info[k];
    nlohmann::json pieces = nlohmann::json::array();
    for (std::size_t i = 0; i < t.piece.pieces(); ++i)
      pieces.push_back({{"length", t.piece.length(i)}, {"value", t.piece.values()[i]}});
    blocks.push_back({{"interval", {t.I.a, t.I.b}},
                      {"label", t.label},
                      {"case", t.case_name},
                      {"mean", t.mean},
                      {"omega", {info.omega_left, info.omega_right}},
                      {"internal_energy", info.internal_energy},
                      {"margin_capped", t.margin_capped},
                      {"degenerate", t.degenerate},
                      {"pieces", pieces}});
  }
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : r.partition.segments)
    segs.push_back({{"interval", {s.I.a, s.I.b}}, {"kind", to_string(s.kind)}});
  return {{"ell_plus", r.partition.ell_plus},
          {"demoted", r.partition.demoted},
          {"m_bar", r.m_bar},
          {"in_K", r.in_K},
          {"max_mass_error", r.max_mass_error},
          {"segments", segs},
          {"blocks", blocks}};
}

Certificate lower_bound_certificate(const GridProfile& p, const ModelParams& params,
                                    const CoarseGrainConfig& cfg, double C_cert) {
  const CoarseGrainResult cg = coarse_grain(p, params, cfg);
  const double E = total_energy(p.with_bc(BoundaryKind::open), params).total;
  const double Et = tilde_energy(cg.sigma, params, false);
  const double L = p.L();
  const double scale = std::pow(params.gamma, 1.0 - cfg.delta);
  const double resid = (E - Et) / L;
  Certificate c;
  c.name = "coarse_grain_lower_bound";
  c.lhs = resid;
  c.rhs = -C_cert * scale;
  c.slack = c.lhs - c.rhs;
  c.params = {{"E", E},
              {"E_tilde", Et},
              {"L", L},
              {"gamma", params.gamma},
              {"delta", cfg.delta},
              {"C_fit", std::max(0.0, -resid / scale)},
              {"C_cert", C_cert},
              {"max_mass_error", cg.max_mass_error},
              {"in_K", cg.in_K ? 1.0 : 0.0}};
  c.pass = c.slack >= 0.0 && cg.max_mass_error <= 1e-12;
  return c;
}

}  // namespace froth
