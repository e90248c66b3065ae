#pragma once

#include "ippmm/neighbourhood.hpp"

namespace ippmm {

/// Primal-dual point together with mu = <X, Z> / n.
struct Iterate {
  SymMatrix X;
  Vector y;
  SymMatrix Z;
  double mu;

  static Iterate make(SymMatrix x, Vector y, SymMatrix z) {
    const double mu = frob_inner(x, z) / x.dim();
    return {std::move(x), std::move(y), std::move(z), mu};
  }
};

/// Proximal estimates (Xi, lambda) and the data fixed by the starting point.
struct ProxState {
  SymMatrix Xi;
  Vector lambda;
  NeighbourhoodParams params;
};

}  // namespace ippmm
