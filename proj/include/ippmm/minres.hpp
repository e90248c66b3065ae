#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "ippmm/linalg.hpp"

namespace ippmm {

enum class MinresControl { Continue, Stop, Restart };

struct MinresResult {
  Vector x;
  int iterations;  // operator applications spent inside the recurrence
  bool stopped;    // the monitor accepted the iterate
  bool breakdown;  // Lanczos produced a zero vector (Krylov space exhausted)
};

/// Unpreconditioned MINRES (Paige & Saunders) for a symmetric, possibly
/// indefinite operator. The monitor sees (x, residual estimate, iteration)
/// after every step and decides whether to continue, stop, or hand control
/// back to the caller for a restart.
template <class Op, class Monitor>
MinresResult minres(const Op& apply, const Vector& b, Vector x, int max_iters, Monitor&& monitor) {
  Vector r1 = b - apply(x);
  Vector y = r1;
  double beta1 = r1.norm();
  if (beta1 == 0.0) {
    const bool ok = monitor(x, 0.0, 0) == MinresControl::Stop;
    return {std::move(x), 0, ok, true};
  }

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vector r2 = r1;
  Vector w = Vector::Zero(b.size()), w1, w2 = Vector::Zero(b.size());
  constexpr double tiny = std::numeric_limits<double>::epsilon();

  int itn = 0;
  while (itn < max_iters) {
    ++itn;
    const Vector v = y / beta;
    y = apply(v);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    oldb = beta;
    beta = y.norm();

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    const MinresControl c = monitor(x, std::abs(phibar), itn);
    if (c == MinresControl::Stop) return {std::move(x), itn, true, false};
    if (c == MinresControl::Restart) return {std::move(x), itn, false, false};
    if (beta <= tiny * beta1) return {std::move(x), itn, false, true};
  }
  return {std::move(x), itn, false, false};
}

}  // namespace ippmm
