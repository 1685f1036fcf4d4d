#include <froth/partition.hpp>

#include <algorithm>
#include <cmath>

#include <froth/errors.hpp>

namespace froth {

double alpha_L(double L, double delta, double gamma) {
  const double target = L * std::pow(gamma, delta);
  // tolerate rounding when L is an exact multiple of gamma^-delta
  long n = static_cast<long>(std::floor(target * (1.0 + 1e-12)));
  if (n < 1) throw DomainTooShort("L = " + std::to_string(L) + " is shorter than gamma^-delta");
  double alpha = target / static_cast<double>(n);
  while (alpha < 1.0 - 1e-12 && n > 1) {
    --n;
    alpha = target / static_cast<double>(n);
  }
  return std::max(alpha, 1.0);
}

BlockPartition regular_partition(double L, double delta, double gamma, PartitionKind kind) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0,1)");
  const double a = alpha_L(L, delta, gamma);
  const long n = std::lround(L * std::pow(gamma, delta) / a);
  BlockPartition p;
  p.kind = kind;
  p.alpha_L = a;
  p.lines.resize(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) p.lines[i] = L * static_cast<double>(i) / static_cast<double>(n);
  p.lines.back() = L;
  p.labels.resize(static_cast<std::size_t>(n));
  return p;
}

BlockPartition snap_to_grid(const BlockPartition& p, double dx) {
  BlockPartition q = p;
  for (auto& x : q.lines) x = std::round(x / dx) * dx;
  for (std::size_t i = 0; i + 1 < q.lines.size(); ++i)
    if (!(q.lines[i + 1] > q.lines[i]))
      throw AlignmentError("grid too coarse for the block partition");
  return q;
}

GridProfile coarse_version(const GridProfile& p, double delta0, double gamma) {
  const auto part = snap_to_grid(
      regular_partition(p.L(), delta0, gamma, PartitionKind::regular_delta0), p.dx());
  std::vector<double> s(p.size());
  for (std::size_t b = 0; b < part.size(); ++b) {
    const std::size_t i0 = p.line_index(part.lines[b]);
    const std::size_t i1 = p.line_index(part.lines[b + 1]);
    double sum = 0.0;
    for (std::size_t i = i0; i < i1; ++i) sum += p[i];
    const double mean = std::clamp(sum / static_cast<double>(i1 - i0), -1.0, 1.0);
    for (std::size_t i = i0; i < i1; ++i) s[i] = mean;
  }
  return p.with_samples(std::move(s));
}

}  // namespace froth
