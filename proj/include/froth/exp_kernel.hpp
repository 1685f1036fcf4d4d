#pragma once

#include <vector>

// Exact double integrals of exp(-kappa |x - y|) against piecewise-constant
// functions, in linear time.
namespace froth::expk {

// x - 1 + e^{-x}, accurate for small x.
double phi2(double x);

// U[p] = sum_q val[q] * int_{P_p} int_{P_q} e^{-kappa |x-y|} dx dy for
// contiguous pieces of lengths len starting at 0.
void potential(const std::vector<double>& len, const std::vector<double>& val, double kappa,
               std::vector<double>& U);

// Same with all pieces of length h.
void potential_uniform(double h, const std::vector<double>& val, double kappa,
                       std::vector<double>& U);

// a[p] = int_{P_p} e^{-kappa x}, b[p] = int_{P_p} e^{-kappa (L - x)}.
struct EdgeMoments {
  std::vector<double> a;
  std::vector<double> b;
};
EdgeMoments edge_moments(const std::vector<double>& len, double kappa);

}  // namespace froth::expk
