#include "qtt/quadrature.hpp"

#include <cmath>

namespace qtt {

GaussLegendre::GaussLegendre(int n, double lo, double hi) {
  if (n < 1 || !(lo < hi)) throw NumericalDomainError("GaussLegendre: bad quadrature spec");
  nodes.resize(n);
  weights.resize(n);
  const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root of P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = mid - half * x;
    nodes[n - 1 - i] = mid + half * x;
    weights[i] = weights[n - 1 - i] = 2.0 * half / ((1.0 - x * x) * pp * pp);
  }
}

}  // namespace qtt
