// Solves min <C,X> s.t. Tr X = 1, X psd for C = diag(1, 3) and prints the
// iterate next to the eigenvalue answer.

#include <cstdio>

#include "ippmm/ippmm.hpp"

int main() {
  using namespace ippmm;
  const SymMatrix c = SymMatrix::diagonal(Vector{{1.0, 3.0}});
  const SdpProblem p({SymMatrix::identity(2)}, Vector::Constant(1, 1.0), c);

  const SolveReport r = solve(p, SolverConfig{});
  const OracleSolution ref = solve_trace_sdp(c);

  std::printf("status %s after %d iterations\n", std::string(status_name(r.status)).c_str(), r.iterations());
  std::printf("objective %.8f (reference %.8f)\n", primal_objective(p, r.iterate.X), ref.value);
  std::printf("X = [%.6f %.6f; %.6f %.6f]\n", r.iterate.X(0, 0), r.iterate.X(0, 1), r.iterate.X(1, 0),
              r.iterate.X(1, 1));
  for (const auto& t : r.trace)
    std::printf("  k=%2d mu=%.3e alpha=%.3f%s\n", t.k, t.mu, t.alpha, t.prox_updated ? " prox" : "");
  return r.status == SolveStatus::Optimal ? 0 : 1;
}
