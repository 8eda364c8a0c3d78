#ifndef QTT_QUADRATURE_HPP_
#define QTT_QUADRATURE_HPP_

#include "qtt/types.hpp"

namespace qtt {

// Gauss-Legendre nodes and weights on [lo, hi].
struct GaussLegendre {
  VectorXd nodes;
  VectorXd weights;

  GaussLegendre(int n, double lo, double hi);

  template <typename F>
  auto integrate(F&& f) const -> std::decay_t<decltype(f(0.0))> {
    auto acc = std::decay_t<decltype(f(0.0))>(weights[0] * f(nodes[0]));
    for (int i = 1; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

}  // namespace qtt

#endif  // QTT_QUADRATURE_HPP_
